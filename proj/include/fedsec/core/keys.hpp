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

#ifndef FEDSEC_CORE_KEYS_HPP_
#define FEDSEC_CORE_KEYS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fedsec/core/document.hpp"
#include "fedsec/core/errors.hpp"

namespace fedsec::core {

using Bytes = std::vector<unsigned char>;

std::string to_base64(const Bytes& data);
std::string to_base64(std::string_view data);
Bytes from_base64(std::string_view text);  // throws KeyError on bad encoding

/// Ed25519 keypair. Signatures are deterministic: signing the same bytes with
/// the same key always yields the same signature, which keeps signed golden
/// files stable.
struct KeyPair {
  Bytes public_key;  // 32 bytes
  Bytes secret_key;  // 64 bytes

  static KeyPair generate();
  /// Derives a keypair from a 32-byte seed. Used wherever reproducible keys
  /// are needed (scenario files carry seeds, not key blobs).
  static KeyPair from_seed(const Bytes& seed);
  static KeyPair from_seed(std::string_view seed_text);  // hashes arbitrary text to a seed

  Document to_document() const;
  static KeyPair from_document(const Document& doc);
};

/// Detached signature over a byte string. Throws KeyError if the secret key
/// is malformed.
Bytes sign_bytes(std::string_view bytes, const Bytes& secret_key);

/// Verification never throws for hostile input: wrong-sized keys or
/// signatures simply verify false.
bool verify_bytes(std::string_view bytes, const Bytes& signature, const Bytes& public_key);

/// Keyed 32-byte hash, used to derive per-token proof-key seeds and other
/// reproducible secondary material.
Bytes derive_seed(const Bytes& key, std::string_view context);

/// Maps principal ids to verification keys. Writable registries reject
/// duplicate ids; lookups on unknown ids return nothing.
class KeyRegistry {
 public:
  void add(const std::string& id, Bytes public_key);  // throws KeyError on duplicate/bad key
  std::optional<Bytes> find(const std::string& id) const;
  bool contains(const std::string& id) const { return keys_.count(id) != 0; }
  const std::map<std::string, Bytes>& all() const { return keys_; }

  Document to_document() const;
  static KeyRegistry from_document(const Document& doc);

 private:
  std::map<std::string, Bytes> keys_;
};

}  // namespace fedsec::core

#endif  // FEDSEC_CORE_KEYS_HPP_
