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

#include "fedsec/core/endpoint.hpp"

#include <cctype>

namespace fedsec::core {

bool is_valid_endpoint_uri(const std::string& uri) {
  // scheme ':' ["//"] authority '/' path
  if (uri.empty() || !std::isalpha(static_cast<unsigned char>(uri[0]))) return false;
  size_t colon = uri.find(':');
  if (colon == std::string::npos || colon == 0) return false;
  for (size_t i = 1; i < colon; ++i) {
    unsigned char c = uri[i];
    if (!std::isalnum(c) && c != '+' && c != '-' && c != '.') return false;
  }
  size_t rest = colon + 1;
  if (uri.compare(rest, 2, "//") == 0) rest += 2;
  size_t slash = uri.find('/', rest);
  if (slash == std::string::npos || slash == rest) return false;  // authority must be non-empty
  return true;
}

EndpointReference::EndpointReference(std::string uri_text,
                                     std::map<std::string, std::string> meta)
    : uri(std::move(uri_text)), metadata(std::move(meta)) {
  if (!is_valid_endpoint_uri(uri))
    throw SchemaError("endpoint uri must look like scheme://authority/path: \"" + uri + "\"");
}

Document EndpointReference::to_document() const {
  Document doc{{"uri", uri}};
  if (!metadata.empty()) {
    Document meta = Document::object();
    for (const auto& [k, v] : metadata) meta[k] = v;
    doc["metadata"] = meta;
  }
  return doc;
}

EndpointReference EndpointReference::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("uri") || !doc.at("uri").is_string())
    throw SchemaError("endpoint document needs a uri field");
  std::map<std::string, std::string> meta;
  if (doc.contains("metadata"))
    for (auto it = doc.at("metadata").begin(); it != doc.at("metadata").end(); ++it)
      meta[it.key()] = it.value().get<std::string>();
  return EndpointReference(doc.at("uri").get<std::string>(), std::move(meta));
}

}  // namespace fedsec::core
