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

#include "fedsec/core/signed_document.hpp"

namespace fedsec::core {

SignedDocument SignedDocument::seal(Document body, std::string signer_id, const KeyPair& key) {
  SignedDocument doc;
  doc.body = std::move(body);
  doc.signer = std::move(signer_id);
  doc.signature = sign_bytes(canonicalize(doc.body), key.secret_key);
  return doc;
}

Document SignedDocument::to_document() const {
  return Document{
      {"body", body}, {"signature", to_base64(signature)}, {"signer", signer}};
}

SignedDocument SignedDocument::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("body") || !doc.contains("signature") ||
      !doc.contains("signer") || !doc.at("signer").is_string() ||
      !doc.at("signature").is_string())
    throw SchemaError("signed envelope needs body, signature and signer fields");
  SignedDocument out;
  out.body = doc.at("body");
  out.signer = doc.at("signer").get<std::string>();
  out.signature = from_base64(doc.at("signature").get<std::string>());
  return out;
}

bool SignedDocument::verify_with(const Bytes& public_key) const {
  return verify_bytes(canonical_body(), signature, public_key);
}

bool SignedDocument::verify(const KeyRegistry& registry) const {
  auto key = registry.find(signer);
  return key && verify_with(*key);
}

}  // namespace fedsec::core
