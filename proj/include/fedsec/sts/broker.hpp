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

#ifndef FEDSEC_STS_BROKER_HPP_
#define FEDSEC_STS_BROKER_HPP_

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "fedsec/core/audit.hpp"
#include "fedsec/core/clock.hpp"
#include "fedsec/sts/model.hpp"

namespace fedsec::sts {

struct IssueResult {
  SecurityToken token;
  core::SignedDocument envelope;
  core::Bytes proof_key_private;
  std::vector<pdp::Obligation> obligations;

  /// Wire form for embedding in message headers.
  std::string armored() const { return core::to_base64(core::canonicalize(envelope.to_document())); }
};

struct ValidationResult {
  bool valid = false;
  std::string reason;  // untrusted-issuer / bad-signature / expired / ...
  std::string subject;
  std::string issuer;
  std::string federation_id;
  std::vector<Claim> claims;
  core::Bytes proof_key;
};

struct IssuanceRecord {
  std::int64_t wall = 0;
  Document envelope;              // the complete signed token
  std::string source_token_id;    // set for exchanges

  Document to_document() const;
};

/// Federation-context-aware security token service.
///
/// Issuance, validation and exchange run against an immutable snapshot of the
/// selected context; management operations serialize through a writer lock.
class Broker {
 public:
  Broker(std::string broker_id, std::string seed, std::set<std::string> administrators,
         core::ClockPtr clock, core::EventSinkPtr sink);

  /// Config form: {"administrators": [...], "broker": id, "contexts": [...],
  /// "seed": text}.
  static std::shared_ptr<Broker> from_document(const Document& doc, core::ClockPtr clock,
                                               core::EventSinkPtr sink);
  Document to_document() const;

  const std::string& id() const { return broker_id_; }
  const core::Bytes& public_key() const { return key_.public_key; }

  /// Unique enabled context whose selector matches. Throws FederationNotFound
  /// (no match; disabled contexts never match) or AmbiguousSelector.
  FederationContext select_federation(const std::map<std::string, std::string>& metadata) const;

  /// Authenticates against the context's configured scheme. Throws
  /// UnknownSubject or AuthenticationFailed.
  InternalIdentity authenticate(const std::string& subject, const Document& credential,
                                const FederationContext& context) const;

  /// Issue pipeline: select -> authenticate -> fetch claims -> transform ->
  /// disclose -> proof key -> sign -> obligations -> log. The private proof
  /// key is returned only here, to the authenticated requester.
  IssueResult issue(const TokenRequest& request);

  /// Never throws on hostile input; every failure is a result with a reason.
  ValidationResult validate(const core::SignedDocument& token_envelope,
                            const std::string& context_reference) const;
  ValidationResult validate_bytes(std::string_view canonical_or_armored,
                                  const std::string& context_reference) const;

  /// Validates the token in its source context at this broker, then issues a
  /// fresh token in the target context with re-transformed claims. Throws
  /// SourceInvalid or FederationNotFound.
  IssueResult exchange(const core::SignedDocument& token_envelope,
                       const std::string& target_context_reference);

  /// Two-part management surface: target "core" for federation lifecycle
  /// (create-federation / enable / disable / inspect), anything else is
  /// dispatched to the named provider's handler. Throws ManagementForbidden,
  /// UnknownProvider, InvalidSpec.
  Document manage(const std::string& principal, const std::string& target,
                  const std::string& operation, const Document& args);

  const std::vector<IssuanceRecord>& issuance_log() const { return issuance_log_; }
  std::vector<std::string> context_ids() const;

  /// Optional service-access hook consulted after claims validation
  /// (integration point for an authorization service). Disabled by default.
  void set_service_access_hook(std::function<bool(const SecurityToken&)> hook) {
    service_access_hook_ = std::move(hook);
  }

 private:
  ValidationResult validate_in_context(const FederationContext& context,
                                       const core::SignedDocument& envelope,
                                       const std::string& audit_context) const;
  IssueResult issue_in_context(const FederationContext& context, const std::string& subject,
                               const std::map<std::string, core::Value>& internal_attributes,
                               const std::set<std::string>& claims_hint,
                               const std::string& target_partner,
                               const std::string& source_token_id);
  void check_selector_disjoint(const FederationContext& candidate) const;
  FederationContext* context_by_id(const std::string& federation_id);
  const FederationContext* context_by_id(const std::string& federation_id) const;
  Document manage_core(const std::string& operation, const Document& args);
  Document manage_provider(const std::string& provider, const std::string& operation,
                           const Document& args);

  std::string broker_id_;
  std::string seed_text_;
  core::KeyPair key_;
  core::Bytes proof_seed_key_;
  std::set<std::string> administrators_;
  core::ClockPtr clock_;
  core::EventSinkPtr sink_;
  std::map<std::string, FederationContext> contexts_;
  std::vector<IssuanceRecord> issuance_log_;
  std::int64_t issue_counter_ = 0;
  std::function<bool(const SecurityToken&)> service_access_hook_;
  mutable std::mutex mutex_;
};

using BrokerPtr = std::shared_ptr<Broker>;

}  // namespace fedsec::sts

#endif  // FEDSEC_STS_BROKER_HPP_
