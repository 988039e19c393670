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

#ifndef FEDSEC_CORE_SIGNED_DOCUMENT_HPP_
#define FEDSEC_CORE_SIGNED_DOCUMENT_HPP_

#include <string>

#include "fedsec/core/document.hpp"
#include "fedsec/core/keys.hpp"

namespace fedsec::core {

/// A document plus a detached signature over its canonical bytes. The
/// signature covers the body only, never the envelope, so re-serializing an
/// envelope preserves signature validity.
struct SignedDocument {
  Document body;
  std::string signer;
  Bytes signature;

  /// Signs canonicalize(body) with the given keypair.
  static SignedDocument seal(Document body, std::string signer_id, const KeyPair& key);

  /// Envelope form: {"body": ..., "signature": base64, "signer": id}.
  Document to_document() const;
  static SignedDocument from_document(const Document& doc);  // throws SchemaError

  std::string canonical_body() const { return canonicalize(body); }

  bool verify_with(const Bytes& public_key) const;
  /// Looks the signer up in the registry; an unknown signer verifies false.
  bool verify(const KeyRegistry& registry) const;
};

}  // namespace fedsec::core

#endif  // FEDSEC_CORE_SIGNED_DOCUMENT_HPP_
