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

#include "fedsec/gateway/message.hpp"

#include "fedsec/core/errors.hpp"

namespace fedsec::gateway {

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    auto dot = path.find('.', start);
    if (dot == std::string::npos) {
      parts.push_back(path.substr(start));
      break;
    }
    parts.push_back(path.substr(start, dot - start));
    start = dot + 1;
  }
  return parts;
}

}  // namespace

const Document* element_at(const Document& root, const std::string& path) {
  if (path.empty()) return &root;
  const Document* node = &root;
  for (const auto& part : split_path(path)) {
    if (!node->is_object() || !node->contains(part)) return nullptr;
    node = &node->at(part);
  }
  return node;
}

void set_element(Document& root, const std::string& path, Document value) {
  auto parts = split_path(path);
  Document* node = &root;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object()) *node = Document::object();
    node = &(*node)[parts[i]];
  }
  if (!node->is_object()) *node = Document::object();
  (*node)[parts.back()] = std::move(value);
}

bool remove_element(Document& root, const std::string& path) {
  auto parts = split_path(path);
  Document* node = &root;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object() || !node->contains(parts[i])) return false;
    node = &(*node)[parts[i]];
  }
  if (!node->is_object() || !node->contains(parts.back())) return false;
  node->erase(parts.back());
  return true;
}

const std::string& Message::correlation_id() const {
  static const std::string empty;
  auto it = headers.find("correlation-id");
  return it == headers.end() ? empty : it->second;
}

std::string to_string(Message::Direction d) {
  return d == Message::Direction::Inbound ? "inbound" : "outbound";
}

Message::Direction direction_from_string(const std::string& s) {
  if (s == "inbound") return Message::Direction::Inbound;
  if (s == "outbound") return Message::Direction::Outbound;
  throw core::SchemaError("unknown message direction: " + s);
}

Document Message::to_document() const {
  Document headers_doc = Document::object();
  for (const auto& [k, v] : headers) headers_doc[k] = v;
  return Document{{"annotations", annotations},
                  {"body", body},
                  {"direction", to_string(direction)},
                  {"headers", headers_doc}};
}

Message Message::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("headers"))
    throw core::SchemaError("message document needs headers");
  Message msg;
  if (doc.contains("direction"))
    msg.direction = direction_from_string(doc.at("direction").get<std::string>());
  for (auto it = doc.at("headers").begin(); it != doc.at("headers").end(); ++it)
    msg.headers[it.key()] = it.value().get<std::string>();
  if (doc.contains("body")) msg.body = doc.at("body");
  if (doc.contains("annotations")) msg.annotations = doc.at("annotations");
  return msg;
}

Document Message::wire_document() const {
  Document headers_doc = Document::object();
  for (const auto& [k, v] : headers) headers_doc[k] = v;
  return Document{{"body", body}, {"direction", to_string(direction)}, {"headers", headers_doc}};
}

}  // namespace fedsec::gateway
