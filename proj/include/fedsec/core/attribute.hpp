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

#ifndef FEDSEC_CORE_ATTRIBUTE_HPP_
#define FEDSEC_CORE_ATTRIBUTE_HPP_

#include <compare>
#include <cstdint>
#include <string>
#include <variant>

#include "fedsec/core/document.hpp"

namespace fedsec::core {

enum class AttributeCategory { Subject, Resource, Action, Environment, Delegate };

std::string to_string(AttributeCategory c);
AttributeCategory attribute_category_from_string(const std::string& s);  // throws SchemaError

/// Wall-clock instant, unix seconds. A distinct type so attribute values can
/// carry time without being confused with plain integers.
struct Timestamp {
  std::int64_t seconds = 0;
  auto operator<=>(const Timestamp&) const = default;
};

/// Scalar attribute value; the active alternative is the value type.
using Value = std::variant<std::string, std::int64_t, bool, Timestamp>;

enum class ValueType { String, Integer, Boolean, Timestamp };

ValueType type_of(const Value& v);
std::string to_string(ValueType t);

Document value_to_document(const Value& v);
Value value_from_document(const Document& doc);  // throws SchemaError
std::string value_to_display(const Value& v);

/// Loose encoding used in hand-written policy files: plain JSON scalars map
/// directly (string/integer/boolean); timestamps are {"type":"timestamp",
/// "value": n}.
Document value_to_loose(const Value& v);
Value value_from_loose(const Document& doc);  // throws SchemaError

/// A typed, categorised name/value pair. Ids are flat dotted names
/// ("subject.role"); requests carry bags of these and policies match on them.
/// The Delegate category only appears in administrative requests the decision
/// engine builds internally — callers cannot submit it.
struct Attribute {
  AttributeCategory category = AttributeCategory::Subject;
  std::string id;
  Value value;

  Attribute() = default;
  Attribute(AttributeCategory c, std::string attr_id, Value v);

  ValueType value_type() const { return type_of(value); }

  Document to_document() const;
  static Attribute from_document(const Document& doc);

  bool operator==(const Attribute&) const = default;
};

/// Checks id shape (non-empty, no whitespace). Throws SchemaError.
void validate_attribute_id(const std::string& id);

}  // namespace fedsec::core

#endif  // FEDSEC_CORE_ATTRIBUTE_HPP_
