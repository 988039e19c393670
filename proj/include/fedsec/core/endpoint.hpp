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

#ifndef FEDSEC_CORE_ENDPOINT_HPP_
#define FEDSEC_CORE_ENDPOINT_HPP_

#include <map>
#include <string>

#include "fedsec/core/document.hpp"

namespace fedsec::core {

/// Common reference representation for remote services and resources.
struct EndpointReference {
  std::string uri;  // scheme://authority/path
  std::map<std::string, std::string> metadata;

  EndpointReference() = default;
  explicit EndpointReference(std::string uri_text,
                             std::map<std::string, std::string> meta = {});

  Document to_document() const;
  static EndpointReference from_document(const Document& doc);

  bool operator==(const EndpointReference&) const = default;
};

bool is_valid_endpoint_uri(const std::string& uri);

}  // namespace fedsec::core

#endif  // FEDSEC_CORE_ENDPOINT_HPP_
