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

#ifndef FEDSEC_GATEWAY_POLICIES_HPP_
#define FEDSEC_GATEWAY_POLICIES_HPP_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fedsec/core/endpoint.hpp"
#include "fedsec/gateway/message.hpp"
#include "fedsec/pdp/model.hpp"

namespace fedsec::gateway {

/// Resolves a guard reference ("header.x", "state.y", "annotation.z",
/// "body.path") to a scalar, or nothing.
using GuardLookup = std::function<std::optional<Document>(const std::string& ref)>;

/// Condition language for ECP selection predicates and step guards: scalar
/// comparisons over message headers, body elements, annotations and
/// enforcement state, joined by all/any/not. Unresolvable references make the
/// comparison false, never an error.
struct Guard {
  enum class Kind { Compare, Exists, All, Any, Not };

  Kind kind = Kind::Compare;
  std::string ref;
  pdp::CompareOp op = pdp::CompareOp::Eq;
  Document value;
  std::vector<Guard> children;

  bool eval(const GuardLookup& lookup) const;

  Document to_document() const;
  static Guard from_document(const Document& doc);
};

/// One enforcement step: the action type, an optional execution condition,
/// action parameters, an optional utility-service reference and declared
/// enforcement-state effects.
struct Step {
  std::string action;
  std::optional<Guard> when;
  Document params = Document::object();
  std::string usp_ref;
  std::map<std::string, Document> set_state;

  Document to_document() const;
  static Step from_document(const Document& doc);
};

/// Enforcement Configuration Policy: what is enforced, under which
/// conditions, with which parameters, in which order, over which state.
struct Ecp {
  std::string id;
  std::optional<Guard> selector;
  std::vector<Step> steps;
  Document state_schema = Document::object();  // variable -> initial value

  Document to_document() const;
  static Ecp from_document(const Document& doc);
};

/// Interceptor Reference Policy: action type -> implementation id (+ config).
struct Irp {
  struct Binding {
    std::string impl_id;
    Document config = Document::object();
  };
  std::map<std::string, Binding> bindings;

  Document to_document() const;
  static Irp from_document(const Document& doc);
};

/// Utility Service Policy: rigid static references to external services with
/// their invocation contracts.
struct UspEntry {
  core::EndpointReference endpoint;
  int timeout_ms = 1000;
  int retries = 0;
  std::string interface_tag;

  Document to_document() const;
  static UspEntry from_document(const Document& doc);
};

struct Usp {
  std::map<std::string, UspEntry> refs;

  Document to_document() const;
  static Usp from_document(const Document& doc);
};

/// Capability Exposure Policy: the client-visible requirements derived from
/// an ECP. Carries no interceptor ids and no USP endpoints.
enum class AssertionKind { RequireToken, SignElements, EncryptElements, Schema };

std::string to_string(AssertionKind k);
AssertionKind assertion_kind_from_string(const std::string& s);

struct CepAssertion {
  std::string id;  // stable, referencable from PDP obligations
  AssertionKind kind = AssertionKind::RequireToken;
  Document params = Document::object();

  Document to_document() const;
  static CepAssertion from_document(const Document& doc);
};

struct Cep {
  std::string id;
  std::vector<CepAssertion> assertions;

  Document to_document() const;
  static Cep from_document(const Document& doc);
};

struct InvalidBundle : std::runtime_error {
  explicit InvalidBundle(const std::string& what) : std::runtime_error(what) {}
};

/// The bound configuration of a gateway instance.
struct Bundle {
  std::map<std::string, Ecp> ecps;  // keyed by id; selection uses id order
  Irp irp;
  Usp usp;
  std::vector<Cep> ceps;

  Document to_document() const;
  static Bundle from_document(const Document& doc);

  /// Cross-reference validation: every step action mapped by the IRP, every
  /// usp-ref resolvable, nested policy references present, declared state
  /// variables consistent. Throws InvalidBundle.
  void validate(const std::set<std::string>& known_impls) const;
};

/// Derives the published CEP from a private ECP: one assertion per step with
/// a client-visible dual, nothing for provider-internal steps.
Cep derive_cep(const Ecp& ecp);

/// Builds the outbound client-side ECP a consumer needs in order to satisfy a
/// served CEP: insert-token / sign-elements / encrypt-elements steps in
/// assertion order. Schema assertions constrain the body the caller builds,
/// not the chain.
Ecp client_ecp_from_cep(const Cep& cep, const std::string& ecp_id);

}  // namespace fedsec::gateway

#endif  // FEDSEC_GATEWAY_POLICIES_HPP_
