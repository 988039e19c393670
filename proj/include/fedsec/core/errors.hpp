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

#ifndef FEDSEC_CORE_ERRORS_HPP_
#define FEDSEC_CORE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace fedsec::core {

/// A value cannot be represented in the canonical document form, or bytes
/// presented as a canonical document do not parse.
struct CanonicalizationError : std::runtime_error {
  explicit CanonicalizationError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or wrong-sized key material.
struct KeyError : std::runtime_error {
  explicit KeyError(const std::string& what) : std::runtime_error(what) {}
};

/// A structurally valid document that does not match the schema a loader
/// expects (missing fields, wrong types, bad enum values).
struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fedsec::core

#endif  // FEDSEC_CORE_ERRORS_HPP_
