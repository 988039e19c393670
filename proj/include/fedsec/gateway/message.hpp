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

#ifndef FEDSEC_GATEWAY_MESSAGE_HPP_
#define FEDSEC_GATEWAY_MESSAGE_HPP_

#include <map>
#include <string>

#include "fedsec/core/document.hpp"

namespace fedsec::gateway {

using core::Document;

/// Addresses a nested body element by dotted path ("order.items.total").
/// Returns nullptr when the path does not resolve to an element.
const Document* element_at(const Document& root, const std::string& path);
/// Creates intermediate objects as needed.
void set_element(Document& root, const std::string& path, Document value);
bool remove_element(Document& root, const std::string& path);

/// An intercepted request or response. Headers carry the token slot, context
/// reference and correlation id; the body is a tree of named elements
/// addressable by path; annotations accumulate interceptor results (validated
/// claims, authorization decisions, proof keys) and never leave the
/// organization that produced them.
struct Message {
  enum class Direction { Inbound, Outbound };

  Direction direction = Direction::Inbound;
  std::map<std::string, std::string> headers;
  Document body = Document::object();
  Document annotations = Document::object();

  std::string header(const std::string& name) const {
    auto it = headers.find(name);
    return it == headers.end() ? std::string() : it->second;
  }
  bool has_header(const std::string& name) const { return headers.count(name) != 0; }
  const std::string& correlation_id() const;

  Document to_document() const;
  static Message from_document(const Document& doc);

  /// The cross-organization wire view: headers and body without annotations.
  Document wire_document() const;
};

std::string to_string(Message::Direction d);
Message::Direction direction_from_string(const std::string& s);

}  // namespace fedsec::gateway

#endif  // FEDSEC_GATEWAY_MESSAGE_HPP_
