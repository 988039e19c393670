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

#ifndef FEDSEC_CORE_DOCUMENT_HPP_
#define FEDSEC_CORE_DOCUMENT_HPP_

#include <string>
#include <string_view>

#include <json.hpp>

#include "fedsec/core/errors.hpp"

namespace fedsec::core {

/// Structured documents are trees of maps, lists and scalars. Object keys are
/// kept sorted by the underlying container, so two documents with the same
/// content compare equal regardless of construction order.
using Document = nlohmann::json;

/// Serializes a document to its canonical byte form:
///   - UTF-8, no insignificant whitespace;
///   - object keys in lexicographic code-point order;
///   - integers in minimal decimal, doubles in shortest round-trip decimal;
///   - minimal string escaping (", \, the \b \t \n \f \r shorthands, and
///     \u00xx for remaining control characters).
///
/// Canonicalization is idempotent: canonicalize(parse(canonicalize(d))) ==
/// canonicalize(d). Every policy, token and scenario file in this project is
/// stored and signed in this form.
///
/// Throws CanonicalizationError for values with no canonical form (NaN,
/// infinities, binary blobs, integers above the signed 64-bit range).
std::string canonicalize(const Document& doc);

/// Parses canonical (or plain JSON) bytes back into a document.
/// Throws CanonicalizationError on malformed input.
Document parse_document(std::string_view bytes);

/// Reads and parses a whole file. Throws CanonicalizationError if the file
/// cannot be read or parsed.
Document read_document_file(const std::string& path);

/// Writes canonicalize(doc) to a file, replacing any previous content.
void write_document_file(const std::string& path, const Document& doc);

}  // namespace fedsec::core

#endif  // FEDSEC_CORE_DOCUMENT_HPP_
