/*
 * Copyright 2026 the fedsec authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FEDSEC_GATEWAY_SERVICES_HPP_
#define FEDSEC_GATEWAY_SERVICES_HPP_

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "fedsec/core/keys.hpp"
#include "fedsec/gateway/policies.hpp"
#include "fedsec/pdp/engine.hpp"
#include "fedsec/sts/broker.hpp"

namespace fedsec::gateway {

struct ServiceUnavailable : std::runtime_error {
  explicit ServiceUnavailable(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownUtilityRef : std::runtime_error {
  explicit UnknownUtilityRef(const std::string& what) : std::runtime_error(what) {}
};

/// Request/response handler behind an endpoint uri. Domain faults come back
/// as {"fault": reason} documents; throwing means the service is unreachable
/// and the call may be retried.
using ServiceHandler = std::function<Document(const Document&)>;

/// In-process service fabric: endpoint uri -> handler. The harness registers
/// brokers, decision points, key stores and application services here.
class ServiceDirectory {
 public:
  void register_service(const std::string& uri, ServiceHandler handler);
  void set_available(const std::string& uri, bool available);
  Document call(const std::string& uri, const Document& request) const;

 private:
  struct Entry {
    ServiceHandler handler;
    bool available = true;
  };
  mutable std::mutex mutex_;
  std::map<std::string, Entry> services_;
};

/// Resolves USP static references and applies the per-entry retry budget.
/// Exhausted retries surface as ServiceUnavailable.
class UtilityClient {
 public:
  UtilityClient(const Usp& usp, const ServiceDirectory& directory)
      : usp_(usp), directory_(directory) {}

  Document call(const std::string& static_ref, const Document& request) const;

 private:
  const Usp& usp_;
  const ServiceDirectory& directory_;
};

// Standard adapters onto the in-process fabric.
ServiceHandler make_sts_service(sts::BrokerPtr broker);
ServiceHandler make_pdp_service(std::shared_ptr<const pdp::PolicyStore> store,
                                std::vector<pdp::AttributeProviderPtr> providers = {});
ServiceHandler make_keystore_service(core::Bytes key);
ServiceHandler make_echo_service(std::string resource_id);

/// Reversible transform applied by encrypt-/decrypt-elements. The scheme is
/// deliberately pluggable; the default is an XSalsa20 stream with a nonce
/// derived from a keyed hash of the plaintext, a deterministic stand-in
/// rather than a reviewed construction.
class ElementCipher {
 public:
  virtual ~ElementCipher() = default;
  virtual Document encrypt(const Document& element, const core::Bytes& key) const = 0;
  virtual Document decrypt(const Document& element, const core::Bytes& key) const = 0;
};

class StreamElementCipher final : public ElementCipher {
 public:
  Document encrypt(const Document& element, const core::Bytes& key) const override;
  Document decrypt(const Document& element, const core::Bytes& key) const override;
};

std::shared_ptr<const ElementCipher> default_element_cipher();

bool is_encrypted_element(const Document& element);

}  // namespace fedsec::gateway

#endif  // FEDSEC_GATEWAY_SERVICES_HPP_
