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

#include "fedsec/gateway/services.hpp"

#include <sodium.h>

#include "fedsec/pdp/decision.hpp"

namespace fedsec::gateway {

void ServiceDirectory::register_service(const std::string& uri, ServiceHandler handler) {
  std::lock_guard<std::mutex> lock(mutex_);
  services_[uri] = Entry{std::move(handler), true};
}

void ServiceDirectory::set_available(const std::string& uri, bool available) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (auto it = services_.find(uri); it != services_.end()) it->second.available = available;
}

Document ServiceDirectory::call(const std::string& uri, const Document& request) const {
  ServiceHandler handler;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = services_.find(uri);
    if (it == services_.end()) throw ServiceUnavailable("no service at " + uri);
    if (!it->second.available) throw ServiceUnavailable("service at " + uri + " is down");
    handler = it->second.handler;
  }
  return handler(request);
}

Document UtilityClient::call(const std::string& static_ref, const Document& request) const {
  auto it = usp_.refs.find(static_ref);
  if (it == usp_.refs.end())
    throw UnknownUtilityRef("no usp entry for static ref " + static_ref);
  const UspEntry& entry = it->second;
  std::string last_error;
  for (int attempt = 0; attempt <= entry.retries; ++attempt) {
    try {
      return directory_.call(entry.endpoint.uri, request);
    } catch (const std::exception& e) {
      last_error = e.what();
    }
  }
  throw ServiceUnavailable("utility " + static_ref + " failed after " +
                           std::to_string(entry.retries + 1) + " attempts: " + last_error);
}

ServiceHandler make_sts_service(sts::BrokerPtr broker) {
  return [broker](const Document& request) -> Document {
    const auto op = request.at("op").get<std::string>();
    try {
      if (op == "issue") {
        sts::TokenRequest token_request;
        token_request.kind = sts::TokenRequestKind::Issue;
        token_request.requester = request.at("requester").get<std::string>();
        token_request.credential = request.at("credential");
        if (request.contains("metadata"))
          for (auto it = request.at("metadata").begin(); it != request.at("metadata").end(); ++it)
            token_request.metadata[it.key()] = it.value().get<std::string>();
        if (request.contains("claims-hint"))
          for (const auto& c : request.at("claims-hint"))
            token_request.claims_hint.insert(c.get<std::string>());
        auto issued = broker->issue(token_request);
        Document obligations = Document::array();
        for (const auto& ob : issued.obligations) obligations.push_back(ob.to_document());
        return Document{{"armored", issued.armored()},
                        {"obligations", obligations},
                        {"proof-key", core::to_base64(issued.token.proof_key)},
                        {"proof-key-private", core::to_base64(issued.proof_key_private)},
                        {"token", issued.envelope.to_document()},
                        {"token-id", issued.token.token_id}};
      }
      if (op == "validate") {
        auto result = broker->validate_bytes(request.at("token").get<std::string>(),
                                             request.at("context-reference").get<std::string>());
        Document claims = Document::array();
        for (const auto& c : result.claims) claims.push_back(c.to_document());
        return Document{{"claims", claims},
                        {"federation", result.federation_id},
                        {"issuer", result.issuer},
                        {"proof-key", core::to_base64(result.proof_key)},
                        {"reason", result.reason},
                        {"subject", result.subject},
                        {"valid", result.valid}};
      }
      if (op == "exchange") {
        auto envelope = core::SignedDocument::from_document(request.at("token"));
        auto issued =
            broker->exchange(envelope, request.at("context-reference").get<std::string>());
        return Document{{"armored", issued.armored()},
                        {"token", issued.envelope.to_document()},
                        {"token-id", issued.token.token_id}};
      }
      return Document{{"fault", "unknown sts operation: " + op}};
    } catch (const std::exception& e) {
      return Document{{"fault", e.what()}};
    }
  };
}

ServiceHandler make_pdp_service(std::shared_ptr<const pdp::PolicyStore> store,
                                std::vector<pdp::AttributeProviderPtr> providers) {
  return [store, providers](const Document& request) -> Document {
    try {
      if (request.at("op").get<std::string>() != "decide")
        return Document{{"fault", "unknown pdp operation"}};
      auto decision_request = pdp::DecisionRequest::from_document(request.at("request"));
      pdp::DecisionEngine engine(*store, providers);
      return engine.decide(decision_request).to_document();
    } catch (const std::exception& e) {
      return Document{{"fault", e.what()}};
    }
  };
}

ServiceHandler make_keystore_service(core::Bytes key) {
  return [key](const Document& request) -> Document {
    if (request.at("op").get<std::string>() != "get-key")
      return Document{{"fault", "unknown keystore operation"}};
    return Document{{"key", core::to_base64(key)}};
  };
}

ServiceHandler make_echo_service(std::string resource_id) {
  return [resource_id](const Document& request) -> Document {
    return Document{{"echo", request}, {"resource", resource_id}};
  };
}

Document StreamElementCipher::encrypt(const Document& element, const core::Bytes& key) const {
  const std::string plain = core::canonicalize(element);
  core::Bytes stream_key(crypto_stream_xsalsa20_KEYBYTES);
  crypto_generichash(stream_key.data(), stream_key.size(), nullptr, 0, key.data(),
                     std::min<std::size_t>(key.size(), crypto_generichash_KEYBYTES_MAX));

  // content-derived nonce keeps the transform deterministic for replay tests
  core::Bytes nonce(crypto_stream_xsalsa20_NONCEBYTES);
  crypto_generichash(nonce.data(), nonce.size(),
                     reinterpret_cast<const unsigned char*>(plain.data()), plain.size(),
                     stream_key.data(), stream_key.size());

  core::Bytes out(nonce.size() + plain.size());
  std::copy(nonce.begin(), nonce.end(), out.begin());
  crypto_stream_xsalsa20_xor(out.data() + nonce.size(),
                             reinterpret_cast<const unsigned char*>(plain.data()), plain.size(),
                             nonce.data(), stream_key.data());
  return Document{{"#enc", core::to_base64(out)}};
}

Document StreamElementCipher::decrypt(const Document& element, const core::Bytes& key) const {
  if (!is_encrypted_element(element))
    throw core::SchemaError("element is not in encrypted form");
  auto blob = core::from_base64(element.at("#enc").get<std::string>());
  if (blob.size() < crypto_stream_xsalsa20_NONCEBYTES)
    throw core::SchemaError("encrypted element is truncated");

  core::Bytes stream_key(crypto_stream_xsalsa20_KEYBYTES);
  crypto_generichash(stream_key.data(), stream_key.size(), nullptr, 0, key.data(),
                     std::min<std::size_t>(key.size(), crypto_generichash_KEYBYTES_MAX));

  std::string plain(blob.size() - crypto_stream_xsalsa20_NONCEBYTES, '\0');
  crypto_stream_xsalsa20_xor(reinterpret_cast<unsigned char*>(plain.data()),
                             blob.data() + crypto_stream_xsalsa20_NONCEBYTES, plain.size(),
                             blob.data(), stream_key.data());
  return core::parse_document(plain);
}

std::shared_ptr<const ElementCipher> default_element_cipher() {
  static const auto cipher = std::make_shared<StreamElementCipher>();
  return cipher;
}

bool is_encrypted_element(const Document& element) {
  return element.is_object() && element.contains("#enc");
}

}  // namespace fedsec::gateway
