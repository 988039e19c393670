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

#include "fedsec/core/document.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fedsec::core {

namespace {

void emit_string(const std::string& s, std::string& out) {
  out.push_back('"');
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(static_cast<char>(c));
        }
    }
  }
  out.push_back('"');
}

void emit(const Document& doc, std::string& out) {
  switch (doc.type()) {
    case Document::value_t::null:
      out += "null";
      break;
    case Document::value_t::boolean:
      out += doc.get<bool>() ? "true" : "false";
      break;
    case Document::value_t::number_integer: {
      char buf[32];
      auto r = std::to_chars(buf, buf + sizeof(buf), doc.get<std::int64_t>());
      out.append(buf, r.ptr);
      break;
    }
    case Document::value_t::number_unsigned: {
      const auto u = doc.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(INT64_MAX))
        throw CanonicalizationError("integer out of canonical (signed 64-bit) range");
      char buf[32];
      auto r = std::to_chars(buf, buf + sizeof(buf), u);
      out.append(buf, r.ptr);
      break;
    }
    case Document::value_t::number_float: {
      const double d = doc.get<double>();
      if (!std::isfinite(d))
        throw CanonicalizationError("non-finite number has no canonical form");
      char buf[64];
      auto r = std::to_chars(buf, buf + sizeof(buf), d);
      out.append(buf, r.ptr);
      break;
    }
    case Document::value_t::string:
      emit_string(doc.get_ref<const std::string&>(), out);
      break;
    case Document::value_t::array: {
      out.push_back('[');
      bool first = true;
      for (const auto& item : doc) {
        if (!first) out.push_back(',');
        first = false;
        emit(item, out);
      }
      out.push_back(']');
      break;
    }
    case Document::value_t::object: {
      // nlohmann objects are std::map-backed, so iteration is already in
      // lexicographic code-point order.
      out.push_back('{');
      bool first = true;
      for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        emit_string(it.key(), out);
        out.push_back(':');
        emit(it.value(), out);
      }
      out.push_back('}');
      break;
    }
    default:
      throw CanonicalizationError("value type has no canonical form");
  }
}

}  // namespace

std::string canonicalize(const Document& doc) {
  std::string out;
  emit(doc, out);
  return out;
}

Document parse_document(std::string_view bytes) {
  Document doc = Document::parse(bytes, nullptr, false);
  if (doc.is_discarded())
    throw CanonicalizationError("malformed document");
  return doc;
}

Document read_document_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw CanonicalizationError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_document(buf.str());
}

void write_document_file(const std::string& path, const Document& doc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw CanonicalizationError("cannot write " + path);
  out << canonicalize(doc);
}

}  // namespace fedsec::core
