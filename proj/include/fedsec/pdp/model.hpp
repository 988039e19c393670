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

#ifndef FEDSEC_PDP_MODEL_HPP_
#define FEDSEC_PDP_MODEL_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fedsec/core/attribute.hpp"
#include "fedsec/core/document.hpp"
#include "fedsec/core/signed_document.hpp"

namespace fedsec::pdp {

using core::Document;

// ---------------------------------------------------------------------------
// Targets

enum class MatchOp { Equals, Prefix, AnyOf, Range };

std::string to_string(MatchOp op);
MatchOp match_op_from_string(const std::string& s);

/// One target clause: the named attribute must carry a value that matches.
///  Equals  — values[0]
///  Prefix  — values[0] is a string prefix
///  AnyOf   — any element of values
///  Range   — values[0]..values[1] inclusive (integer or timestamp)
struct TargetClause {
  std::string attribute;
  MatchOp op = MatchOp::Equals;
  std::vector<core::Value> values;

  Document to_document() const;
  static TargetClause from_document(const Document& doc);
  bool operator==(const TargetClause&) const = default;
};

/// Conjunction of clauses; an empty clause list matches every request.
struct TargetMatcher {
  std::vector<TargetClause> clauses;

  Document to_document() const;
  static TargetMatcher from_document(const Document& doc);
  bool operator==(const TargetMatcher&) const = default;
};

// ---------------------------------------------------------------------------
// Conditions

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

std::string to_string(CompareOp op);
CompareOp compare_op_from_string(const std::string& s);

/// Boolean expression over attribute values: comparisons joined by
/// conjunction, disjunction and negation. A comparison over an attribute the
/// resolver cannot supply is unknown, which surfaces as Indeterminate.
struct Condition {
  enum class Kind { Compare, All, Any, Not };

  Kind kind = Kind::Compare;
  // Compare
  std::string attribute;
  CompareOp op = CompareOp::Eq;
  core::Value value;
  // All / Any / Not (Not holds exactly one child)
  std::vector<Condition> children;

  static Condition compare(std::string attribute, CompareOp op, core::Value value);
  static Condition all_of(std::vector<Condition> children);
  static Condition any_of(std::vector<Condition> children);
  static Condition negate(Condition child);

  Document to_document() const;
  static Condition from_document(const Document& doc);

  /// Attribute ids referenced anywhere in the expression.
  void collect_attribute_ids(std::set<std::string>& out) const;
};

// ---------------------------------------------------------------------------
// Rules and policies

enum class Effect { Permit, Deny };

struct Obligation {
  std::string id;
  std::map<std::string, std::string> parameters;
  std::string cep_assertion_ref;  // optional, empty when absent

  Document to_document() const;
  static Obligation from_document(const Document& doc);
  bool operator==(const Obligation&) const = default;
};

struct Rule {
  std::string id;
  Effect effect = Effect::Permit;
  std::optional<Condition> condition;
  std::vector<Obligation> obligations;

  Document to_document() const;
  static Rule from_document(const Document& doc);
};

enum class CombiningAlg { DenyOverrides, PermitOverrides, FirstApplicable, PriorityOverride };

std::string to_string(CombiningAlg alg);
CombiningAlg combining_alg_from_string(const std::string& s);

enum class PolicyKind { Root, Delegated, Administrative };

std::string to_string(PolicyKind k);
PolicyKind policy_kind_from_string(const std::string& s);

/// Limits on what an admitted issuer may author: attribute vocabulary,
/// combining algorithms, a target scope the issued policy's target must fall
/// inside, and how deep re-delegation may go.
struct DelegationConstraint {
  std::set<std::string> allowed_attribute_ids;
  std::set<CombiningAlg> allowed_combining;
  TargetMatcher target_scope;
  int max_chain_depth = 1;

  Document to_document() const;
  static DelegationConstraint from_document(const Document& doc);
};

/// A signed access or administrative policy.
///
/// Root policies carry no issuer; their signer must be a pre-configured
/// trusted authority. Delegated and administrative policies receive their
/// issuer from the envelope signature at load time. Administrative policies
/// carry the delegation constraint; access policies never do.
struct AuthzPolicy {
  std::string id;
  PolicyKind kind = PolicyKind::Root;
  std::optional<std::string> issuer;
  std::int64_t priority = 0;
  TargetMatcher target;
  std::vector<Rule> rules;
  CombiningAlg combining = CombiningAlg::DenyOverrides;
  std::int64_t not_before = 0;
  std::int64_t not_after = 0;
  std::optional<DelegationConstraint> constraint;

  bool in_validity(std::int64_t now) const { return not_before <= now && now <= not_after; }

  /// Every attribute id the policy can touch: target clauses plus rule
  /// conditions. This is the set delegation constraints restrict.
  std::set<std::string> used_attribute_ids() const;

  Document body_document() const;
  /// Parses a policy body. Issuer is never read from the body — it is
  /// assigned by the loader from the signature. Throws core::SchemaError.
  static AuthzPolicy parse_body(const Document& body);
};

}  // namespace fedsec::pdp

#endif  // FEDSEC_PDP_MODEL_HPP_
