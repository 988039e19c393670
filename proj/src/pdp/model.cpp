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

#include "fedsec/pdp/model.hpp"

#include "fedsec/core/errors.hpp"

namespace fedsec::pdp {

using core::SchemaError;

std::string to_string(MatchOp op) {
  switch (op) {
    case MatchOp::Equals: return "equals";
    case MatchOp::Prefix: return "prefix";
    case MatchOp::AnyOf: return "any-of";
    case MatchOp::Range: return "range";
  }
  return "equals";
}

MatchOp match_op_from_string(const std::string& s) {
  if (s == "equals") return MatchOp::Equals;
  if (s == "prefix") return MatchOp::Prefix;
  if (s == "any-of") return MatchOp::AnyOf;
  if (s == "range") return MatchOp::Range;
  throw SchemaError("unknown match op: " + s);
}

Document TargetClause::to_document() const {
  Document doc{{"attr", attribute}, {"op", to_string(op)}};
  switch (op) {
    case MatchOp::Equals:
    case MatchOp::Prefix:
      doc["value"] = core::value_to_loose(values.at(0));
      break;
    case MatchOp::AnyOf: {
      Document arr = Document::array();
      for (const auto& v : values) arr.push_back(core::value_to_loose(v));
      doc["values"] = arr;
      break;
    }
    case MatchOp::Range:
      doc["min"] = core::value_to_loose(values.at(0));
      doc["max"] = core::value_to_loose(values.at(1));
      break;
  }
  return doc;
}

TargetClause TargetClause::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("attr") || !doc.contains("op"))
    throw SchemaError("target clause needs attr and op fields");
  TargetClause clause;
  clause.attribute = doc.at("attr").get<std::string>();
  core::validate_attribute_id(clause.attribute);
  clause.op = match_op_from_string(doc.at("op").get<std::string>());
  switch (clause.op) {
    case MatchOp::Equals:
    case MatchOp::Prefix:
      if (!doc.contains("value")) throw SchemaError("clause needs a value");
      clause.values.push_back(core::value_from_loose(doc.at("value")));
      if (clause.op == MatchOp::Prefix &&
          core::type_of(clause.values[0]) != core::ValueType::String)
        throw SchemaError("prefix clause needs a string value");
      break;
    case MatchOp::AnyOf: {
      if (!doc.contains("values") || !doc.at("values").is_array() || doc.at("values").empty())
        throw SchemaError("any-of clause needs a non-empty values array");
      for (const auto& v : doc.at("values"))
        clause.values.push_back(core::value_from_loose(v));
      break;
    }
    case MatchOp::Range: {
      if (!doc.contains("min") || !doc.contains("max"))
        throw SchemaError("range clause needs min and max");
      clause.values.push_back(core::value_from_loose(doc.at("min")));
      clause.values.push_back(core::value_from_loose(doc.at("max")));
      for (const auto& v : clause.values) {
        auto t = core::type_of(v);
        if (t != core::ValueType::Integer && t != core::ValueType::Timestamp)
          throw SchemaError("range clause bounds must be integers or timestamps");
      }
      break;
    }
  }
  return clause;
}

Document TargetMatcher::to_document() const {
  Document arr = Document::array();
  for (const auto& c : clauses) arr.push_back(c.to_document());
  return Document{{"clauses", arr}};
}

TargetMatcher TargetMatcher::from_document(const Document& doc) {
  TargetMatcher t;
  if (doc.is_null()) return t;
  if (!doc.is_object() || !doc.contains("clauses") || !doc.at("clauses").is_array())
    throw SchemaError("target needs a clauses array");
  for (const auto& c : doc.at("clauses")) t.clauses.push_back(TargetClause::from_document(c));
  return t;
}

std::string to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "eq";
    case CompareOp::Ne: return "ne";
    case CompareOp::Lt: return "lt";
    case CompareOp::Le: return "le";
    case CompareOp::Gt: return "gt";
    case CompareOp::Ge: return "ge";
  }
  return "eq";
}

CompareOp compare_op_from_string(const std::string& s) {
  if (s == "eq") return CompareOp::Eq;
  if (s == "ne") return CompareOp::Ne;
  if (s == "lt") return CompareOp::Lt;
  if (s == "le") return CompareOp::Le;
  if (s == "gt") return CompareOp::Gt;
  if (s == "ge") return CompareOp::Ge;
  throw SchemaError("unknown compare op: " + s);
}

Condition Condition::compare(std::string attribute, CompareOp op, core::Value value) {
  Condition c;
  c.kind = Kind::Compare;
  c.attribute = std::move(attribute);
  c.op = op;
  c.value = std::move(value);
  return c;
}

Condition Condition::all_of(std::vector<Condition> children) {
  Condition c;
  c.kind = Kind::All;
  c.children = std::move(children);
  return c;
}

Condition Condition::any_of(std::vector<Condition> children) {
  Condition c;
  c.kind = Kind::Any;
  c.children = std::move(children);
  return c;
}

Condition Condition::negate(Condition child) {
  Condition c;
  c.kind = Kind::Not;
  c.children.push_back(std::move(child));
  return c;
}

Document Condition::to_document() const {
  switch (kind) {
    case Kind::Compare:
      return Document{{"attr", attribute},
                      {"op", to_string(op)},
                      {"value", core::value_to_loose(value)}};
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

Condition Condition::from_document(const Document& doc) {
  if (!doc.is_object()) throw SchemaError("condition must be an object");
  if (doc.contains("all")) {
    std::vector<Condition> kids;
    for (const auto& c : doc.at("all")) kids.push_back(from_document(c));
    return all_of(std::move(kids));
  }
  if (doc.contains("any")) {
    std::vector<Condition> kids;
    for (const auto& c : doc.at("any")) kids.push_back(from_document(c));
    return any_of(std::move(kids));
  }
  if (doc.contains("not")) return negate(from_document(doc.at("not")));
  if (doc.contains("attr") && doc.contains("op") && doc.contains("value")) {
    std::string attr = doc.at("attr").get<std::string>();
    core::validate_attribute_id(attr);
    return compare(std::move(attr), compare_op_from_string(doc.at("op").get<std::string>()),
                   core::value_from_loose(doc.at("value")));
  }
  throw SchemaError("condition needs all/any/not or attr+op+value");
}

void Condition::collect_attribute_ids(std::set<std::string>& out) const {
  if (kind == Kind::Compare) {
    out.insert(attribute);
    return;
  }
  for (const auto& c : children) c.collect_attribute_ids(out);
}

Document Obligation::to_document() const {
  Document doc{{"id", id}};
  if (!parameters.empty()) {
    Document params = Document::object();
    for (const auto& [k, v] : parameters) params[k] = v;
    doc["params"] = params;
  }
  if (!cep_assertion_ref.empty()) doc["assertion-ref"] = cep_assertion_ref;
  return doc;
}

Obligation Obligation::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("id"))
    throw SchemaError("obligation needs an id");
  Obligation ob;
  ob.id = doc.at("id").get<std::string>();
  if (doc.contains("params"))
    for (auto it = doc.at("params").begin(); it != doc.at("params").end(); ++it)
      ob.parameters[it.key()] = it.value().get<std::string>();
  if (doc.contains("assertion-ref")) ob.cep_assertion_ref = doc.at("assertion-ref").get<std::string>();
  return ob;
}

Document Rule::to_document() const {
  Document doc{{"effect", effect == Effect::Permit ? "permit" : "deny"}, {"id", id}};
  if (condition) doc["condition"] = condition->to_document();
  if (!obligations.empty()) {
    Document arr = Document::array();
    for (const auto& ob : obligations) arr.push_back(ob.to_document());
    doc["obligations"] = arr;
  }
  return doc;
}

Rule Rule::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("id") || !doc.contains("effect"))
    throw SchemaError("rule needs id and effect");
  Rule rule;
  rule.id = doc.at("id").get<std::string>();
  const auto effect = doc.at("effect").get<std::string>();
  if (effect == "permit")
    rule.effect = Effect::Permit;
  else if (effect == "deny")
    rule.effect = Effect::Deny;
  else
    throw SchemaError("rule effect must be permit or deny");
  if (doc.contains("condition")) rule.condition = Condition::from_document(doc.at("condition"));
  if (doc.contains("obligations"))
    for (const auto& ob : doc.at("obligations"))
      rule.obligations.push_back(Obligation::from_document(ob));
  return rule;
}

std::string to_string(CombiningAlg alg) {
  switch (alg) {
    case CombiningAlg::DenyOverrides: return "deny-overrides";
    case CombiningAlg::PermitOverrides: return "permit-overrides";
    case CombiningAlg::FirstApplicable: return "first-applicable";
    case CombiningAlg::PriorityOverride: return "priority-override";
  }
  return "deny-overrides";
}

CombiningAlg combining_alg_from_string(const std::string& s) {
  if (s == "deny-overrides") return CombiningAlg::DenyOverrides;
  if (s == "permit-overrides") return CombiningAlg::PermitOverrides;
  if (s == "first-applicable") return CombiningAlg::FirstApplicable;
  if (s == "priority-override") return CombiningAlg::PriorityOverride;
  throw SchemaError("unknown combining algorithm: " + s);
}

std::string to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::Root: return "root";
    case PolicyKind::Delegated: return "delegated";
    case PolicyKind::Administrative: return "administrative";
  }
  return "root";
}

PolicyKind policy_kind_from_string(const std::string& s) {
  if (s == "root") return PolicyKind::Root;
  if (s == "delegated") return PolicyKind::Delegated;
  if (s == "administrative") return PolicyKind::Administrative;
  throw SchemaError("unknown policy kind: " + s);
}

Document DelegationConstraint::to_document() const {
  Document attrs = Document::array();
  for (const auto& a : allowed_attribute_ids) attrs.push_back(a);
  Document algs = Document::array();
  for (const auto& alg : allowed_combining) algs.push_back(to_string(alg));
  return Document{{"allowed-attributes", attrs},
                  {"allowed-combining", algs},
                  {"max-depth", max_chain_depth},
                  {"scope", target_scope.to_document()}};
}

DelegationConstraint DelegationConstraint::from_document(const Document& doc) {
  if (!doc.is_object()) throw SchemaError("constraint must be an object");
  DelegationConstraint dc;
  if (doc.contains("allowed-attributes"))
    for (const auto& a : doc.at("allowed-attributes"))
      dc.allowed_attribute_ids.insert(a.get<std::string>());
  if (doc.contains("allowed-combining"))
    for (const auto& a : doc.at("allowed-combining"))
      dc.allowed_combining.insert(combining_alg_from_string(a.get<std::string>()));
  if (doc.contains("scope")) dc.target_scope = TargetMatcher::from_document(doc.at("scope"));
  if (doc.contains("max-depth")) dc.max_chain_depth = doc.at("max-depth").get<int>();
  if (dc.max_chain_depth < 1) throw SchemaError("max-depth must be >= 1");
  return dc;
}

std::set<std::string> AuthzPolicy::used_attribute_ids() const {
  std::set<std::string> out;
  for (const auto& c : target.clauses) out.insert(c.attribute);
  for (const auto& r : rules)
    if (r.condition) r.condition->collect_attribute_ids(out);
  return out;
}

Document AuthzPolicy::body_document() const {
  Document rules_doc = Document::array();
  for (const auto& r : rules) rules_doc.push_back(r.to_document());
  Document doc{{"combining", to_string(combining)},
               {"id", id},
               {"kind", to_string(kind)},
               {"priority", priority},
               {"rules", rules_doc},
               {"target", target.to_document()},
               {"validity", Document{{"not-after", not_after}, {"not-before", not_before}}}};
  if (constraint) doc["constraint"] = constraint->to_document();
  return doc;
}

AuthzPolicy AuthzPolicy::parse_body(const Document& body) {
  if (!body.is_object()) throw SchemaError("policy body must be an object");
  for (const char* field : {"id", "kind", "validity"})
    if (!body.contains(field)) throw SchemaError(std::string("policy body needs ") + field);

  AuthzPolicy p;
  p.id = body.at("id").get<std::string>();
  if (p.id.empty()) throw SchemaError("policy id must be non-empty");
  p.kind = policy_kind_from_string(body.at("kind").get<std::string>());
  if (body.contains("priority")) p.priority = body.at("priority").get<std::int64_t>();
  if (body.contains("target")) p.target = TargetMatcher::from_document(body.at("target"));
  if (body.contains("combining"))
    p.combining = combining_alg_from_string(body.at("combining").get<std::string>());
  if (body.contains("rules"))
    for (const auto& r : body.at("rules")) p.rules.push_back(Rule::from_document(r));

  const auto& validity = body.at("validity");
  if (!validity.is_object() || !validity.contains("not-before") || !validity.contains("not-after"))
    throw SchemaError("policy validity needs not-before and not-after");
  p.not_before = validity.at("not-before").get<std::int64_t>();
  p.not_after = validity.at("not-after").get<std::int64_t>();
  if (p.not_before > p.not_after) throw SchemaError("policy validity window is empty");

  if (body.contains("constraint")) {
    if (p.kind != PolicyKind::Administrative)
      throw SchemaError("only administrative policies carry a delegation constraint");
    p.constraint = DelegationConstraint::from_document(body.at("constraint"));
  } else if (p.kind == PolicyKind::Administrative) {
    throw SchemaError("administrative policy needs a delegation constraint");
  }
  return p;
}

}  // namespace fedsec::pdp
