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

#include "fedsec/core/attribute.hpp"

#include <cctype>

namespace fedsec::core {

std::string to_string(AttributeCategory c) {
  switch (c) {
    case AttributeCategory::Subject: return "subject";
    case AttributeCategory::Resource: return "resource";
    case AttributeCategory::Action: return "action";
    case AttributeCategory::Environment: return "environment";
    case AttributeCategory::Delegate: return "delegate";
  }
  return "subject";
}

AttributeCategory attribute_category_from_string(const std::string& s) {
  if (s == "subject") return AttributeCategory::Subject;
  if (s == "resource") return AttributeCategory::Resource;
  if (s == "action") return AttributeCategory::Action;
  if (s == "environment") return AttributeCategory::Environment;
  if (s == "delegate") return AttributeCategory::Delegate;
  throw SchemaError("unknown attribute category: " + s);
}

ValueType type_of(const Value& v) {
  switch (v.index()) {
    case 0: return ValueType::String;
    case 1: return ValueType::Integer;
    case 2: return ValueType::Boolean;
    default: return ValueType::Timestamp;
  }
}

std::string to_string(ValueType t) {
  switch (t) {
    case ValueType::String: return "string";
    case ValueType::Integer: return "integer";
    case ValueType::Boolean: return "boolean";
    case ValueType::Timestamp: return "timestamp";
  }
  return "string";
}

Document value_to_document(const Value& v) {
  Document doc;
  doc["type"] = to_string(type_of(v));
  switch (type_of(v)) {
    case ValueType::String: doc["value"] = std::get<std::string>(v); break;
    case ValueType::Integer: doc["value"] = std::get<std::int64_t>(v); break;
    case ValueType::Boolean: doc["value"] = std::get<bool>(v); break;
    case ValueType::Timestamp: doc["value"] = std::get<Timestamp>(v).seconds; break;
  }
  return doc;
}

Value value_from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("type") || !doc.contains("value"))
    throw SchemaError("value document needs type and value fields");
  const auto type = doc.at("type").get<std::string>();
  const auto& val = doc.at("value");
  if (type == "string") {
    if (!val.is_string()) throw SchemaError("string value expected");
    return val.get<std::string>();
  }
  if (type == "integer") {
    if (!val.is_number_integer() && !val.is_number_unsigned())
      throw SchemaError("integer value expected");
    return val.get<std::int64_t>();
  }
  if (type == "boolean") {
    if (!val.is_boolean()) throw SchemaError("boolean value expected");
    return val.get<bool>();
  }
  if (type == "timestamp") {
    if (!val.is_number_integer() && !val.is_number_unsigned())
      throw SchemaError("timestamp value expected");
    return Timestamp{val.get<std::int64_t>()};
  }
  throw SchemaError("unknown value type: " + type);
}

Document value_to_loose(const Value& v) {
  switch (type_of(v)) {
    case ValueType::String: return Document(std::get<std::string>(v));
    case ValueType::Integer: return Document(std::get<std::int64_t>(v));
    case ValueType::Boolean: return Document(std::get<bool>(v));
    case ValueType::Timestamp:
      return Document{{"type", "timestamp"}, {"value", std::get<Timestamp>(v).seconds}};
  }
  return Document();
}

Value value_from_loose(const Document& doc) {
  if (doc.is_string()) return doc.get<std::string>();
  if (doc.is_boolean()) return doc.get<bool>();
  if (doc.is_number_integer() || doc.is_number_unsigned()) return doc.get<std::int64_t>();
  if (doc.is_object()) return value_from_document(doc);
  throw SchemaError("cannot read attribute value: " + doc.dump());
}

std::string value_to_display(const Value& v) {
  switch (type_of(v)) {
    case ValueType::String: return std::get<std::string>(v);
    case ValueType::Integer: return std::to_string(std::get<std::int64_t>(v));
    case ValueType::Boolean: return std::get<bool>(v) ? "true" : "false";
    case ValueType::Timestamp: return std::to_string(std::get<Timestamp>(v).seconds) + "s";
  }
  return {};
}

void validate_attribute_id(const std::string& id) {
  if (id.empty())
    throw SchemaError("attribute id must be non-empty");
  for (unsigned char c : id)
    if (std::isspace(c))
      throw SchemaError("attribute id must not contain whitespace: \"" + id + "\"");
}

Attribute::Attribute(AttributeCategory c, std::string attr_id, Value v)
    : category(c), id(std::move(attr_id)), value(std::move(v)) {
  validate_attribute_id(id);
}

Document Attribute::to_document() const {
  Document doc = value_to_document(value);
  doc["category"] = to_string(category);
  doc["id"] = id;
  return doc;
}

Attribute Attribute::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("category") || !doc.contains("id"))
    throw SchemaError("attribute document needs category and id fields");
  return Attribute(attribute_category_from_string(doc.at("category").get<std::string>()),
                   doc.at("id").get<std::string>(), value_from_document(doc));
}

}  // namespace fedsec::core
