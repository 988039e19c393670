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

#include "fedsec/core/keys.hpp"

#include <sodium.h>

#include <mutex>

namespace fedsec::core {

namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0)
      throw KeyError("libsodium initialization failed");
  });
}

}  // namespace

std::string to_base64(const Bytes& data) {
  return to_base64(std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

std::string to_base64(std::string_view data) {
  ensure_sodium();
  std::string out(sodium_base64_encoded_len(data.size(), sodium_base64_VARIANT_ORIGINAL), '\0');
  sodium_bin2base64(out.data(), out.size(),
                    reinterpret_cast<const unsigned char*>(data.data()), data.size(),
                    sodium_base64_VARIANT_ORIGINAL);
  out.resize(out.find('\0') == std::string::npos ? out.size() : out.find('\0'));
  return out;
}

Bytes from_base64(std::string_view text) {
  ensure_sodium();
  Bytes out(text.size());  // decoded size is always smaller
  size_t written = 0;
  if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(), nullptr,
                        &written, nullptr, sodium_base64_VARIANT_ORIGINAL) != 0)
    throw KeyError("invalid base64");
  out.resize(written);
  return out;
}

KeyPair KeyPair::generate() {
  ensure_sodium();
  KeyPair kp;
  kp.public_key.resize(crypto_sign_PUBLICKEYBYTES);
  kp.secret_key.resize(crypto_sign_SECRETKEYBYTES);
  crypto_sign_keypair(kp.public_key.data(), kp.secret_key.data());
  return kp;
}

KeyPair KeyPair::from_seed(const Bytes& seed) {
  ensure_sodium();
  if (seed.size() != crypto_sign_SEEDBYTES)
    throw KeyError("signing seed must be 32 bytes");
  KeyPair kp;
  kp.public_key.resize(crypto_sign_PUBLICKEYBYTES);
  kp.secret_key.resize(crypto_sign_SECRETKEYBYTES);
  crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(), seed.data());
  return kp;
}

KeyPair KeyPair::from_seed(std::string_view seed_text) {
  ensure_sodium();
  Bytes seed(crypto_sign_SEEDBYTES);
  crypto_generichash(seed.data(), seed.size(),
                     reinterpret_cast<const unsigned char*>(seed_text.data()), seed_text.size(),
                     nullptr, 0);
  return from_seed(seed);
}

Document KeyPair::to_document() const {
  return Document{{"public", to_base64(public_key)}, {"secret", to_base64(secret_key)}};
}

KeyPair KeyPair::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("public"))
    throw SchemaError("keypair document needs a public field");
  KeyPair kp;
  kp.public_key = from_base64(doc.at("public").get<std::string>());
  if (doc.contains("secret"))
    kp.secret_key = from_base64(doc.at("secret").get<std::string>());
  if (kp.public_key.size() != crypto_sign_PUBLICKEYBYTES)
    throw KeyError("bad public key size");
  if (!kp.secret_key.empty() && kp.secret_key.size() != crypto_sign_SECRETKEYBYTES)
    throw KeyError("bad secret key size");
  return kp;
}

Bytes sign_bytes(std::string_view bytes, const Bytes& secret_key) {
  ensure_sodium();
  if (secret_key.size() != crypto_sign_SECRETKEYBYTES)
    throw KeyError("bad secret key size");
  Bytes sig(crypto_sign_BYTES);
  crypto_sign_detached(sig.data(), nullptr,
                       reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(),
                       secret_key.data());
  return sig;
}

bool verify_bytes(std::string_view bytes, const Bytes& signature, const Bytes& public_key) {
  ensure_sodium();
  if (signature.size() != crypto_sign_BYTES || public_key.size() != crypto_sign_PUBLICKEYBYTES)
    return false;
  return crypto_sign_verify_detached(signature.data(),
                                     reinterpret_cast<const unsigned char*>(bytes.data()),
                                     bytes.size(), public_key.data()) == 0;
}

Bytes derive_seed(const Bytes& key, std::string_view context) {
  ensure_sodium();
  Bytes out(crypto_sign_SEEDBYTES);
  crypto_generichash(out.data(), out.size(),
                     reinterpret_cast<const unsigned char*>(context.data()), context.size(),
                     key.data(), key.size() > crypto_generichash_KEYBYTES_MAX
                                     ? crypto_generichash_KEYBYTES_MAX
                                     : key.size());
  return out;
}

void KeyRegistry::add(const std::string& id, Bytes public_key) {
  if (id.empty())
    throw KeyError("principal id must be non-empty");
  if (public_key.empty())
    throw KeyError("verification key must be non-empty");
  if (keys_.count(id))
    throw KeyError("duplicate principal id: " + id);
  keys_.emplace(id, std::move(public_key));
}

std::optional<Bytes> KeyRegistry::find(const std::string& id) const {
  auto it = keys_.find(id);
  if (it == keys_.end()) return std::nullopt;
  return it->second;
}

Document KeyRegistry::to_document() const {
  Document principals = Document::object();
  for (const auto& [id, key] : keys_)
    principals[id] = to_base64(key);
  return Document{{"principals", principals}};
}

KeyRegistry KeyRegistry::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("principals") || !doc.at("principals").is_object())
    throw SchemaError("key registry document needs a principals object");
  KeyRegistry reg;
  for (auto it = doc.at("principals").begin(); it != doc.at("principals").end(); ++it)
    reg.add(it.key(), from_base64(it.value().get<std::string>()));
  return reg;
}

}  // namespace fedsec::core
