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

#include "fedsec/gateway/policies.hpp"

#include <set>

#include "fedsec/core/errors.hpp"

namespace fedsec::gateway {

using core::SchemaError;

namespace {

int compare_scalars(const Document& a, const Document& b, bool& comparable) {
  comparable = true;
  if (a.is_string() && b.is_string()) {
    return a.get<std::string>().compare(b.get<std::string>());
  }
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>(), y = b.get<double>();
    return x < y ? -1 : x > y ? 1 : 0;
  }
  if (a.is_boolean() && b.is_boolean()) {
    return a.get<bool>() == b.get<bool>() ? 0 : (a.get<bool>() ? 1 : -1);
  }
  comparable = false;
  return 0;
}

}  // namespace

bool Guard::eval(const GuardLookup& lookup) const {
  switch (kind) {
    case Kind::Compare: {
      auto resolved = lookup(ref);
      if (!resolved) return false;  // unresolvable reference: fail the guard
      bool comparable = false;
      const int cmp = compare_scalars(*resolved, value, comparable);
      if (!comparable) return false;
      switch (op) {
        case pdp::CompareOp::Eq: return cmp == 0;
        case pdp::CompareOp::Ne: return cmp != 0;
        case pdp::CompareOp::Lt: return cmp < 0;
        case pdp::CompareOp::Le: return cmp <= 0;
        case pdp::CompareOp::Gt: return cmp > 0;
        case pdp::CompareOp::Ge: return cmp >= 0;
      }
      return false;
    }
    case Kind::Exists:
      return lookup(ref).has_value();
    case Kind::All:
      for (const auto& child : children)
        if (!child.eval(lookup)) return false;
      return true;
    case Kind::Any:
      for (const auto& child : children)
        if (child.eval(lookup)) return true;
      return false;
    case Kind::Not:
      return !children.at(0).eval(lookup);
  }
  return false;
}

Document Guard::to_document() const {
  switch (kind) {
    case Kind::Compare:
      return Document{{"op", pdp::to_string(op)}, {"ref", ref}, {"value", value}};
    case Kind::Exists:
      return Document{{"exists", ref}};
    case Kind::All: {
      Document arr = Document::array();
      for (const auto& c : children) arr.push_back(c.to_document());
      return Document{{"all", arr}};
    }
    case Kind::Any: {
      Document arr = Document::array();
      for (const auto& c : children) arr.push_back(c.to_document());
      return Document{{"any", arr}};
    }
    case Kind::Not:
      return Document{{"not", children.at(0).to_document()}};
  }
  return Document();
}

Guard Guard::from_document(const Document& doc) {
  if (!doc.is_object()) throw SchemaError("guard must be an object");
  Guard g;
  if (doc.contains("all")) {
    g.kind = Kind::All;
    for (const auto& c : doc.at("all")) g.children.push_back(from_document(c));
    return g;
  }
  if (doc.contains("any")) {
    g.kind = Kind::Any;
    for (const auto& c : doc.at("any")) g.children.push_back(from_document(c));
    return g;
  }
  if (doc.contains("not")) {
    g.kind = Kind::Not;
    g.children.push_back(from_document(doc.at("not")));
    return g;
  }
  if (doc.contains("exists")) {
    g.kind = Kind::Exists;
    g.ref = doc.at("exists").get<std::string>();
    return g;
  }
  if (doc.contains("ref") && doc.contains("op") && doc.contains("value")) {
    g.kind = Kind::Compare;
    g.ref = doc.at("ref").get<std::string>();
    g.op = pdp::compare_op_from_string(doc.at("op").get<std::string>());
    g.value = doc.at("value");
    if (!g.value.is_primitive() || g.value.is_null())
      throw SchemaError("guard value must be a scalar");
    return g;
  }
  throw SchemaError("guard needs all/any/not/exists or ref+op+value");
}

Document Step::to_document() const {
  Document doc{{"action", action}};
  if (when) doc["when"] = when->to_document();
  if (!params.empty()) doc["params"] = params;
  if (!usp_ref.empty()) doc["usp-ref"] = usp_ref;
  if (!set_state.empty()) {
    Document st = Document::object();
    for (const auto& [k, v] : set_state) st[k] = v;
    doc["set-state"] = st;
  }
  return doc;
}

Step Step::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("action"))
    throw SchemaError("step needs an action");
  Step s;
  s.action = doc.at("action").get<std::string>();
  if (doc.contains("when")) s.when = Guard::from_document(doc.at("when"));
  if (doc.contains("params")) s.params = doc.at("params");
  if (doc.contains("usp-ref")) s.usp_ref = doc.at("usp-ref").get<std::string>();
  if (doc.contains("set-state"))
    for (auto it = doc.at("set-state").begin(); it != doc.at("set-state").end(); ++it)
      s.set_state[it.key()] = it.value();
  return s;
}

Document Ecp::to_document() const {
  Document steps_doc = Document::array();
  for (const auto& s : steps) steps_doc.push_back(s.to_document());
  Document doc{{"id", id}, {"state", state_schema}, {"steps", steps_doc}};
  if (selector) doc["select"] = selector->to_document();
  return doc;
}

Ecp Ecp::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("id") || !doc.contains("steps"))
    throw SchemaError("ecp needs id and steps");
  Ecp ecp;
  ecp.id = doc.at("id").get<std::string>();
  if (ecp.id.empty()) throw SchemaError("ecp id must be non-empty");
  if (doc.contains("select")) ecp.selector = Guard::from_document(doc.at("select"));
  if (doc.contains("state")) {
    if (!doc.at("state").is_object()) throw SchemaError("ecp state schema must be an object");
    ecp.state_schema = doc.at("state");
  }
  for (const auto& s : doc.at("steps")) ecp.steps.push_back(Step::from_document(s));
  return ecp;
}

Document Irp::to_document() const {
  Document map = Document::object();
  for (const auto& [action, binding] : bindings) {
    Document b{{"impl", binding.impl_id}};
    if (!binding.config.empty()) b["config"] = binding.config;
    map[action] = b;
  }
  return Document{{"map", map}};
}

Irp Irp::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("map"))
    throw SchemaError("irp needs a map");
  Irp irp;
  for (auto it = doc.at("map").begin(); it != doc.at("map").end(); ++it) {
    Binding b;
    b.impl_id = it.value().at("impl").get<std::string>();
    if (it.value().contains("config")) b.config = it.value().at("config");
    irp.bindings[it.key()] = std::move(b);
  }
  return irp;
}

Document UspEntry::to_document() const {
  return Document{{"endpoint", endpoint.to_document()},
                  {"interface", interface_tag},
                  {"retries", retries},
                  {"timeout-ms", timeout_ms}};
}

UspEntry UspEntry::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("endpoint"))
    throw SchemaError("usp entry needs an endpoint");
  UspEntry e;
  e.endpoint = core::EndpointReference::from_document(doc.at("endpoint"));
  if (doc.contains("timeout-ms")) e.timeout_ms = doc.at("timeout-ms").get<int>();
  if (doc.contains("retries")) e.retries = doc.at("retries").get<int>();
  if (doc.contains("interface")) e.interface_tag = doc.at("interface").get<std::string>();
  return e;
}

Document Usp::to_document() const {
  Document refs_doc = Document::object();
  for (const auto& [ref, entry] : refs) refs_doc[ref] = entry.to_document();
  return Document{{"refs", refs_doc}};
}

Usp Usp::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("refs"))
    throw SchemaError("usp needs refs");
  Usp usp;
  for (auto it = doc.at("refs").begin(); it != doc.at("refs").end(); ++it)
    usp.refs[it.key()] = UspEntry::from_document(it.value());
  return usp;
}

std::string to_string(AssertionKind k) {
  switch (k) {
    case AssertionKind::RequireToken: return "require-token";
    case AssertionKind::SignElements: return "sign-elements";
    case AssertionKind::EncryptElements: return "encrypt-elements";
    case AssertionKind::Schema: return "schema";
  }
  return "require-token";
}

AssertionKind assertion_kind_from_string(const std::string& s) {
  if (s == "require-token") return AssertionKind::RequireToken;
  if (s == "sign-elements") return AssertionKind::SignElements;
  if (s == "encrypt-elements") return AssertionKind::EncryptElements;
  if (s == "schema") return AssertionKind::Schema;
  throw SchemaError("unknown assertion kind: " + s);
}

Document CepAssertion::to_document() const {
  return Document{{"id", id}, {"kind", to_string(kind)}, {"params", params}};
}

CepAssertion CepAssertion::from_document(const Document& doc) {
  CepAssertion a;
  a.id = doc.at("id").get<std::string>();
  a.kind = assertion_kind_from_string(doc.at("kind").get<std::string>());
  if (doc.contains("params")) a.params = doc.at("params");
  return a;
}

Document Cep::to_document() const {
  Document arr = Document::array();
  for (const auto& a : assertions) arr.push_back(a.to_document());
  return Document{{"assertions", arr}, {"id", id}};
}

Cep Cep::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("id"))
    throw SchemaError("cep needs an id");
  Cep cep;
  cep.id = doc.at("id").get<std::string>();
  if (doc.contains("assertions"))
    for (const auto& a : doc.at("assertions"))
      cep.assertions.push_back(CepAssertion::from_document(a));
  return cep;
}

Document Bundle::to_document() const {
  Document ecps_doc = Document::array();
  for (const auto& [id, ecp] : ecps) ecps_doc.push_back(ecp.to_document());
  Document ceps_doc = Document::array();
  for (const auto& cep : ceps) ceps_doc.push_back(cep.to_document());
  return Document{{"ceps", ceps_doc},
                  {"ecps", ecps_doc},
                  {"irp", irp.to_document()},
                  {"usp", usp.to_document()}};
}

Bundle Bundle::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("ecps"))
    throw SchemaError("bundle needs ecps");
  Bundle b;
  for (const auto& e : doc.at("ecps")) {
    auto ecp = Ecp::from_document(e);
    if (!b.ecps.emplace(ecp.id, ecp).second)
      throw SchemaError("duplicate ecp id: " + ecp.id);
  }
  if (doc.contains("irp")) b.irp = Irp::from_document(doc.at("irp"));
  if (doc.contains("usp")) b.usp = Usp::from_document(doc.at("usp"));
  if (doc.contains("ceps"))
    for (const auto& c : doc.at("ceps")) b.ceps.push_back(Cep::from_document(c));
  return b;
}

void Bundle::validate(const std::set<std::string>& known_impls) const {
  static const std::set<std::string> kNeedsUtility{"insert-token", "validate-token", "authorize",
                                                   "encrypt-elements", "decrypt-elements"};
  for (const auto& [ecp_id, ecp] : ecps) {
    for (const auto& step : ecp.steps) {
      auto binding = irp.bindings.find(step.action);
      if (binding == irp.bindings.end())
        throw InvalidBundle("ecp " + ecp_id + " uses action " + step.action +
                            " absent from the irp");
      if (!known_impls.count(binding->second.impl_id))
        throw InvalidBundle("irp maps " + step.action + " to unknown implementation " +
                            binding->second.impl_id);
      if (!step.usp_ref.empty() && !usp.refs.count(step.usp_ref))
        throw InvalidBundle("ecp " + ecp_id + " references usp ref " + step.usp_ref +
                            " absent from the usp");
      if (kNeedsUtility.count(step.action) && step.usp_ref.empty())
        throw InvalidBundle("ecp " + ecp_id + " step " + step.action +
                            " needs a usp-ref to its external service");
      if (step.action == "apply-policy") {
        if (!step.params.contains("ecp") || !ecps.count(step.params.at("ecp").get<std::string>()))
          throw InvalidBundle("apply-policy in " + ecp_id + " references an unknown ecp");
      }
      for (const auto& [var, value] : step.set_state)
        if (!ecp.state_schema.contains(var))
          throw InvalidBundle("ecp " + ecp_id + " writes undeclared state variable " + var);
    }
  }
}

Cep derive_cep(const Ecp& ecp) {
  Cep cep;
  cep.id = ecp.id + "-cep";
  auto add = [&](AssertionKind kind, Document params) {
    CepAssertion assertion;
    assertion.id = ecp.id + ".a" + std::to_string(cep.assertions.size());
    assertion.kind = kind;
    assertion.params = std::move(params);
    cep.assertions.push_back(std::move(assertion));
  };

  for (const auto& step : ecp.steps) {
    if (step.action == "validate-token") {
      Document params{{"type", "fedsec-token"}};
      if (step.params.contains("context-reference"))
        params["context"] = step.params.at("context-reference");
      if (step.params.contains("issuer")) params["issuer"] = step.params.at("issuer");
      add(AssertionKind::RequireToken, std::move(params));
    } else if (step.action == "verify-elements") {
      add(AssertionKind::SignElements, Document{{"paths", step.params.at("paths")}});
    } else if (step.action == "decrypt-elements") {
      add(AssertionKind::EncryptElements, Document{{"paths", step.params.at("paths")}});
    } else if (step.action == "validate-structure") {
      add(AssertionKind::Schema, Document{{"schema", step.params.at("schema")}});
    }
    // route, audit-emit, authorize, transform, apply-policy, insert-token,
    // sign-elements, encrypt-elements: no client-visible dual
  }
  return cep;
}

Ecp client_ecp_from_cep(const Cep& cep, const std::string& ecp_id) {
  Ecp ecp;
  ecp.id = ecp_id;
  for (const auto& assertion : cep.assertions) {
    Step step;
    switch (assertion.kind) {
      case AssertionKind::RequireToken:
        step.action = "insert-token";
        if (assertion.params.contains("context"))
          step.params["context-reference"] = assertion.params.at("context");
        step.usp_ref = "sts";
        break;
      case AssertionKind::SignElements:
        step.action = "sign-elements";
        step.params["paths"] = assertion.params.at("paths");
        break;
      case AssertionKind::EncryptElements:
        step.action = "encrypt-elements";
        step.params["paths"] = assertion.params.at("paths");
        step.usp_ref = "keystore";
        break;
      case AssertionKind::Schema:
        continue;  // constrains the body, not the chain
    }
    ecp.steps.push_back(std::move(step));
  }
  return ecp;
}

}  // namespace fedsec::gateway
