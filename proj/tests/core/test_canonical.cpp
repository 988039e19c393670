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

#include <doctest.h>

#include <limits>
#include <random>

#include "fedsec/core/document.hpp"

using fedsec::core::CanonicalizationError;
using fedsec::core::canonicalize;
using fedsec::core::Document;
using fedsec::core::parse_document;

namespace {

// Random float-free documents; the cross-serializer oracle below relies on
// the float-free restriction.
Document random_document(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 5 : 3);
  std::uniform_int_distribution<int> size(0, 4);
  std::uniform_int_distribution<int> chr(0, 127);
  switch (pick(rng)) {
    case 0: return Document(nullptr);
    case 1: return Document(rng() % 2 == 0);
    case 2: return Document(static_cast<std::int64_t>(rng()) - (1LL << 31));
    case 3: {
      std::string s;
      int n = size(rng) * 3;
      for (int i = 0; i < n; ++i) s.push_back(static_cast<char>(chr(rng)));
      s += "\xc3\xa9";  // keep some non-ASCII UTF-8 in play
      return Document(s);
    }
    case 4: {
      Document arr = Document::array();
      for (int i = 0, n = size(rng); i < n; ++i) arr.push_back(random_document(rng, depth - 1));
      return arr;
    }
    default: {
      Document obj = Document::object();
      for (int i = 0, n = size(rng); i < n; ++i)
        obj["k" + std::to_string(rng() % 10)] = random_document(rng, depth - 1);
      return obj;
    }
  }
}

}  // namespace

TEST_CASE("empty document encodes to two bytes") {
  CHECK(canonicalize(Document::object()) == "{}");
  CHECK(canonicalize(Document::array()) == "[]");
}

TEST_CASE("key order does not matter") {
  auto a = parse_document(R"({"b":1,"a":2})");
  auto b = parse_document(R"({"a":2,"b":1})");
  CHECK(canonicalize(a) == canonicalize(b));
  CHECK(canonicalize(a) == R"({"a":2,"b":1})");
}

TEST_CASE("strings escape minimally") {
  Document doc;
  doc["s"] = std::string("a\"b\\c\nd\te\x01" "f");
  CHECK(canonicalize(doc) == "{\"s\":\"a\\\"b\\\\c\\nd\\te\\u0001f\"}");
  // UTF-8 passes through unescaped
  Document u;
  u["s"] = std::string("caf\xc3\xa9");
  CHECK(canonicalize(u) == "{\"s\":\"caf\xc3\xa9\"}");
}

TEST_CASE("numbers are minimal decimals") {
  Document doc;
  doc["i"] = std::int64_t{-42};
  doc["j"] = std::int64_t{0};
  doc["x"] = 0.5;
  CHECK(canonicalize(doc) == R"({"i":-42,"j":0,"x":0.5})");
}

TEST_CASE("non-finite numbers are rejected") {
  Document doc;
  doc["x"] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(canonicalize(doc), CanonicalizationError);
  doc["x"] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(canonicalize(doc), CanonicalizationError);
}

TEST_CASE("binary values are rejected") {
  auto doc = Document::binary({1, 2, 3});
  CHECK_THROWS_AS(canonicalize(doc), CanonicalizationError);
}

TEST_CASE("malformed input does not parse") {
  CHECK_THROWS_AS(parse_document("{\"a\":"), CanonicalizationError);
  CHECK_THROWS_AS(parse_document(""), CanonicalizationError);
}

TEST_CASE("canonicalization is idempotent over random documents") {
  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i) {
    Document doc = random_document(rng, 3);
    const auto once = canonicalize(doc);
    CHECK(canonicalize(parse_document(once)) == once);
  }
}

TEST_CASE("cross-check against an independent serializer") {
  // nlohmann's compact dump over its sorted-map object representation is a
  // second, independently written implementation of the same canonical form
  // for float-free documents.
  std::mt19937 rng(11);
  for (int i = 0; i < 500; ++i) {
    Document doc = random_document(rng, 3);
    CHECK(canonicalize(doc) == doc.dump());
  }
  // and a fixed three-level nested policy-shaped document
  auto nested = parse_document(R"({
    "id": "pol-1",
    "rules": [{"condition": {"all": [{"attr": "subject.role", "op": "eq", "value": "engineer"}]},
               "effect": "permit", "id": "r1"}],
    "target": {"clauses": [{"attr": "resource.path", "op": "prefix", "value": "/docs/"}]}
  })");
  CHECK(canonicalize(nested) == nested.dump());
}
