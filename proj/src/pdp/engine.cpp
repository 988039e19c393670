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

#include "fedsec/pdp/engine.hpp"

#include <algorithm>
#include <cassert>

namespace fedsec::pdp {

using core::Attribute;
using core::AttributeCategory;
using core::Timestamp;
using core::Value;
using core::ValueType;

namespace {

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

bool numeric_value(const Value& v, std::int64_t& out) {
  if (core::type_of(v) == ValueType::Integer) {
    out = std::get<std::int64_t>(v);
    return true;
  }
  if (core::type_of(v) == ValueType::Timestamp) {
    out = std::get<Timestamp>(v).seconds;
    return true;
  }
  return false;
}

bool value_matches(const Value& v, const TargetClause& clause) {
  switch (clause.op) {
    case MatchOp::Equals:
      return v == clause.values[0];
    case MatchOp::Prefix:
      return core::type_of(v) == ValueType::String &&
             starts_with(std::get<std::string>(v), std::get<std::string>(clause.values[0]));
    case MatchOp::AnyOf:
      return std::find(clause.values.begin(), clause.values.end(), v) != clause.values.end();
    case MatchOp::Range: {
      std::int64_t x, lo, hi;
      if (!numeric_value(v, x) || !numeric_value(clause.values[0], lo) ||
          !numeric_value(clause.values[1], hi))
        return false;
      if (core::type_of(v) != core::type_of(clause.values[0])) return false;
      return lo <= x && x <= hi;
    }
  }
  return false;
}

enum class Tri { False, True, Unknown };

bool compare_values(const Value& lhs, CompareOp op, const Value& rhs) {
  const auto lt = core::type_of(lhs);
  if (lt != core::type_of(rhs)) return false;
  int cmp;
  switch (lt) {
    case ValueType::String:
      cmp = std::get<std::string>(lhs).compare(std::get<std::string>(rhs));
      break;
    case ValueType::Integer: {
      auto a = std::get<std::int64_t>(lhs), b = std::get<std::int64_t>(rhs);
      cmp = a < b ? -1 : a > b ? 1 : 0;
      break;
    }
    case ValueType::Timestamp: {
      auto a = std::get<Timestamp>(lhs).seconds, b = std::get<Timestamp>(rhs).seconds;
      cmp = a < b ? -1 : a > b ? 1 : 0;
      break;
    }
    case ValueType::Boolean: {
      if (op != CompareOp::Eq && op != CompareOp::Ne) return false;
      cmp = std::get<bool>(lhs) == std::get<bool>(rhs) ? 0 : 1;
      break;
    }
    default:
      return false;
  }
  switch (op) {
    case CompareOp::Eq: return cmp == 0;
    case CompareOp::Ne: return cmp != 0;
    case CompareOp::Lt: return cmp < 0;
    case CompareOp::Le: return cmp <= 0;
    case CompareOp::Gt: return cmp > 0;
    case CompareOp::Ge: return cmp >= 0;
  }
  return false;
}

Tri eval_condition(const Condition& cond, AttributeResolver& resolver) {
  switch (cond.kind) {
    case Condition::Kind::Compare: {
      const auto& bag = resolver.lookup(cond.attribute);
      if (bag.empty()) return Tri::Unknown;
      for (const auto& v : bag)
        if (compare_values(v, cond.op, cond.value)) return Tri::True;
      return Tri::False;
    }
    case Condition::Kind::All: {
      bool unknown = false;
      for (const auto& child : cond.children) {
        Tri r = eval_condition(child, resolver);
        if (r == Tri::False) return Tri::False;
        if (r == Tri::Unknown) unknown = true;
      }
      return unknown ? Tri::Unknown : Tri::True;
    }
    case Condition::Kind::Any: {
      bool unknown = false;
      for (const auto& child : cond.children) {
        Tri r = eval_condition(child, resolver);
        if (r == Tri::True) return Tri::True;
        if (r == Tri::Unknown) unknown = true;
      }
      return unknown ? Tri::Unknown : Tri::False;
    }
    case Condition::Kind::Not: {
      Tri r = eval_condition(cond.children.at(0), resolver);
      if (r == Tri::Unknown) return Tri::Unknown;
      return r == Tri::True ? Tri::False : Tri::True;
    }
  }
  return Tri::Unknown;
}

/// Containment of one clause's match set in another's, per match-op pair.
bool clause_contained(const TargetClause& inner, const TargetClause& outer) {
  switch (outer.op) {
    case MatchOp::Equals:
      if (inner.op == MatchOp::Equals) return inner.values[0] == outer.values[0];
      if (inner.op == MatchOp::AnyOf)
        return std::all_of(inner.values.begin(), inner.values.end(),
                           [&](const Value& v) { return v == outer.values[0]; });
      return false;
    case MatchOp::Prefix: {
      const auto& prefix = std::get<std::string>(outer.values[0]);
      auto has_prefix = [&](const Value& v) {
        return core::type_of(v) == ValueType::String &&
               starts_with(std::get<std::string>(v), prefix);
      };
      if (inner.op == MatchOp::Equals) return has_prefix(inner.values[0]);
      if (inner.op == MatchOp::Prefix)
        return starts_with(std::get<std::string>(inner.values[0]), prefix);
      if (inner.op == MatchOp::AnyOf)
        return std::all_of(inner.values.begin(), inner.values.end(), has_prefix);
      return false;
    }
    case MatchOp::AnyOf: {
      auto member = [&](const Value& v) {
        return std::find(outer.values.begin(), outer.values.end(), v) != outer.values.end();
      };
      if (inner.op == MatchOp::Equals) return member(inner.values[0]);
      if (inner.op == MatchOp::AnyOf)
        return std::all_of(inner.values.begin(), inner.values.end(), member);
      return false;
    }
    case MatchOp::Range: {
      std::int64_t lo, hi;
      if (!numeric_value(outer.values[0], lo) || !numeric_value(outer.values[1], hi)) return false;
      auto in_range = [&](const Value& v) {
        std::int64_t x;
        return numeric_value(v, x) && core::type_of(v) == core::type_of(outer.values[0]) &&
               lo <= x && x <= hi;
      };
      if (inner.op == MatchOp::Equals) return in_range(inner.values[0]);
      if (inner.op == MatchOp::AnyOf)
        return std::all_of(inner.values.begin(), inner.values.end(), in_range);
      if (inner.op == MatchOp::Range) {
        std::int64_t l2, h2;
        if (!numeric_value(inner.values[0], l2) || !numeric_value(inner.values[1], h2))
          return false;
        if (core::type_of(inner.values[0]) != core::type_of(outer.values[0])) return false;
        return lo <= l2 && h2 <= hi;
      }
      return false;
    }
  }
  return false;
}

}  // namespace

std::shared_ptr<MapAttributeProvider> MapAttributeProvider::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("attributes"))
    throw core::SchemaError("attribute provider document needs an attributes object");
  std::map<std::string, std::vector<Value>> values;
  for (auto it = doc.at("attributes").begin(); it != doc.at("attributes").end(); ++it) {
    std::vector<Value> bag;
    for (const auto& v : it.value()) bag.push_back(core::value_from_loose(v));
    values[it.key()] = std::move(bag);
  }
  std::string name = doc.contains("name") ? doc.at("name").get<std::string>() : "file";
  return std::make_shared<MapAttributeProvider>(std::move(name), std::move(values));
}

const std::vector<Value>& AttributeResolver::lookup(const std::string& attribute_id) {
  if (auto it = cache_.find(attribute_id); it != cache_.end()) return it->second;
  auto request_values = request_.values_of(attribute_id);
  if (!request_values.empty())
    return cache_.emplace(attribute_id, std::move(request_values)).first->second;
  for (const auto& provider : providers_) {
    try {
      auto values = provider->resolve(attribute_id, request_);
      notes_.push_back({attribute_id, provider->name(), false, values.size()});
      if (!values.empty())
        return cache_.emplace(attribute_id, std::move(values)).first->second;
    } catch (const std::exception&) {
      notes_.push_back({attribute_id, provider->name(), true, 0});
    }
  }
  return cache_.emplace(attribute_id, std::vector<Value>{}).first->second;
}

bool match_target(const TargetMatcher& target, const DecisionRequest& request) {
  for (const auto& clause : target.clauses) {
    const auto values = request.values_of(clause.attribute);
    const bool matched = std::any_of(values.begin(), values.end(),
                                     [&](const Value& v) { return value_matches(v, clause); });
    if (!matched) return false;
  }
  return true;
}

bool target_subsumes(const TargetMatcher& scope, const TargetMatcher& target) {
  for (const auto& outer : scope.clauses) {
    const bool covered = std::any_of(
        target.clauses.begin(), target.clauses.end(), [&](const TargetClause& inner) {
          return inner.attribute == outer.attribute && clause_contained(inner, outer);
        });
    if (!covered) return false;
  }
  return true;
}

Decision combine(const std::vector<std::pair<std::int64_t, Decision>>& decisions,
                 CombiningAlg alg) {
  switch (alg) {
    case CombiningAlg::DenyOverrides: {
      bool permit = false, indeterminate = false;
      for (const auto& [prio, d] : decisions) {
        if (d == Decision::Deny) return Decision::Deny;
        if (d == Decision::Permit) permit = true;
        if (d == Decision::Indeterminate) indeterminate = true;
      }
      if (indeterminate) return Decision::Indeterminate;
      return permit ? Decision::Permit : Decision::NotApplicable;
    }
    case CombiningAlg::PermitOverrides: {
      bool deny = false, indeterminate = false;
      for (const auto& [prio, d] : decisions) {
        if (d == Decision::Permit) return Decision::Permit;
        if (d == Decision::Deny) deny = true;
        if (d == Decision::Indeterminate) indeterminate = true;
      }
      if (indeterminate) return Decision::Indeterminate;
      return deny ? Decision::Deny : Decision::NotApplicable;
    }
    case CombiningAlg::FirstApplicable: {
      for (const auto& [prio, d] : decisions)
        if (d != Decision::NotApplicable) return d;
      return Decision::NotApplicable;
    }
    case CombiningAlg::PriorityOverride: {
      auto sorted = decisions;
      std::stable_sort(sorted.begin(), sorted.end(),
                       [](const auto& a, const auto& b) { return a.first > b.first; });
      // Overriding is local to the overlap: non-applicable entries never mask
      // lower-priority ones; an error at the top of the scan propagates.
      for (const auto& [prio, d] : sorted)
        if (d != Decision::NotApplicable) return d;
      return Decision::NotApplicable;
    }
  }
  return Decision::NotApplicable;
}

PolicyEvaluation evaluate_policy(const AuthzPolicy& policy, const DecisionRequest& request,
                                 AttributeResolver& resolver) {
  if (!match_target(policy.target, request)) return {Decision::NotApplicable, {}};

  std::vector<std::pair<std::int64_t, Decision>> decisions;
  std::vector<Decision> per_rule;
  const std::int64_t n = static_cast<std::int64_t>(policy.rules.size());
  for (std::int64_t i = 0; i < n; ++i) {
    const Rule& rule = policy.rules[i];
    Decision d;
    if (!rule.condition) {
      d = rule.effect == Effect::Permit ? Decision::Permit : Decision::Deny;
    } else {
      switch (eval_condition(*rule.condition, resolver)) {
        case Tri::True: d = rule.effect == Effect::Permit ? Decision::Permit : Decision::Deny; break;
        case Tri::False: d = Decision::NotApplicable; break;
        default: d = Decision::Indeterminate; break;
      }
    }
    decisions.emplace_back(n - i, d);  // list order doubles as rule priority
    per_rule.push_back(d);
  }

  PolicyEvaluation out;
  out.decision = combine(decisions, policy.combining);
  if (out.decision == Decision::Permit || out.decision == Decision::Deny) {
    for (std::size_t i = 0; i < policy.rules.size(); ++i)
      if (per_rule[i] == out.decision)
        out.obligations.insert(out.obligations.end(), policy.rules[i].obligations.begin(),
                               policy.rules[i].obligations.end());
  }
  return out;
}

std::vector<DecisionRequest> preprocess(const DecisionRequest& request) {
  request.validate();
  std::vector<Attribute> shared;
  for (const auto& a : request.attributes)
    if (a.id != "resource.id") shared.push_back(a);

  std::vector<DecisionRequest> out;
  std::set<std::string> seen;
  for (const auto& rid : request.resource_ids) {
    if (!seen.insert(rid).second) continue;  // duplicates decided once
    DecisionRequest sub;
    sub.context_id = request.context_id;
    sub.resource_ids = {rid};
    sub.attributes = shared;
    sub.attributes.emplace_back(AttributeCategory::Resource, "resource.id", rid);
    out.push_back(std::move(sub));
  }
  return out;
}

DecisionRequest administrative_request(const DecisionRequest& base,
                                       const std::string& delegate_id) {
  DecisionRequest admin;
  admin.context_id = base.context_id;
  admin.resource_ids = base.resource_ids;
  for (const auto& a : base.attributes)
    admin.attributes.emplace_back(a.category, "delegated." + a.id, a.value);
  admin.attributes.emplace_back(AttributeCategory::Delegate, "delegate.id", delegate_id);
  return admin;
}

namespace {

bool constraint_admits(const DelegationConstraint& constraint, const AuthzPolicy& policy) {
  if (!constraint.allowed_attribute_ids.empty()) {
    for (const auto& id : policy.used_attribute_ids())
      if (!constraint.allowed_attribute_ids.count(id)) return false;
  }
  if (!constraint.allowed_combining.empty() &&
      !constraint.allowed_combining.count(policy.combining))
    return false;
  return target_subsumes(constraint.target_scope, policy.target);
}

struct ChainSearch {
  const PolicyStore& store;
  const DecisionRequest& base;
  std::vector<const PolicyRecord*> admin_policies;  // enabled, in validity, sorted by id

  void chains_for(const AuthzPolicy& q, std::set<std::string>& visited,
                  std::vector<std::vector<const AuthzPolicy*>>& out) const {
    if (!q.issuer) return;
    const DecisionRequest admin_req = administrative_request(base, *q.issuer);
    for (const PolicyRecord* record : admin_policies) {
      const AuthzPolicy& a = record->policy;
      if (a.id == q.id) continue;
      if (!match_target(a.target, admin_req)) continue;
      if (!a.constraint || !constraint_admits(*a.constraint, q)) continue;
      if (a.issuer && store.trusted_authorities().count(*a.issuer)) {
        out.push_back({&a, &q});
        continue;
      }
      if (!a.issuer || visited.count(*a.issuer)) continue;  // cycle
      visited.insert(*a.issuer);
      std::vector<std::vector<const AuthzPolicy*>> sub;
      chains_for(a, visited, sub);
      visited.erase(*a.issuer);
      for (auto& chain : sub) {
        chain.push_back(&q);
        out.push_back(std::move(chain));
      }
    }
  }
};

}  // namespace

DelegationResult validate_delegation(const AuthzPolicy& policy, const DecisionRequest& request,
                                     const PolicyStore& store) {
  DelegationResult result;
  if (!policy.issuer) return result;

  ChainSearch search{store, request, {}};
  const std::int64_t now = store.clock().now_unix();
  for (const auto& [id, record] : store.delegated_compartment()) {
    if (record.policy.kind != PolicyKind::Administrative) continue;
    if (!record.enabled || !record.policy.in_validity(now)) continue;
    search.admin_policies.push_back(&record);
  }

  std::set<std::string> visited{*policy.issuer};
  std::vector<std::vector<const AuthzPolicy*>> chains;
  search.chains_for(policy, visited, chains);

  for (const auto& chain : chains) {
    const int edges = static_cast<int>(chain.size()) - 1;
    int cap = INT32_MAX;
    for (const AuthzPolicy* link : chain)
      if (link->constraint) cap = std::min(cap, link->constraint->max_chain_depth);
    if (edges > cap) continue;
    result.authorized = true;
    for (const AuthzPolicy* link : chain) result.chain.push_back(link->id);
    return result;
  }
  return result;
}

DecisionEngine::DecisionEngine(const PolicyStore& store,
                               std::vector<AttributeProviderPtr> providers, EngineOptions options)
    : store_(store), providers_(std::move(providers)), options_(options) {}

DecisionResponse DecisionEngine::decide(const DecisionRequest& request) const {
  request.validate();
  const auto subs = preprocess(request);
  const std::int64_t now = store_.clock().now_unix();

  // Gather access policies once: enabled, inside their validity window.
  std::vector<const PolicyRecord*> live;
  for (const auto* compartment : {&store_.root_compartment(), &store_.delegated_compartment()})
    for (const auto& [id, record] : *compartment) {
      if (record.policy.kind == PolicyKind::Administrative) continue;
      if (!record.enabled || !record.policy.in_validity(now)) continue;
      live.push_back(&record);
    }

  if (options_.partial_evaluation) {
    // Discard policies that cannot match any sub-request. Each sub-request
    // re-checks its own target match below, so this never changes results.
    std::vector<const PolicyRecord*> kept;
    for (const auto* record : live) {
      const bool possible = std::any_of(subs.begin(), subs.end(), [&](const DecisionRequest& s) {
        return match_target(record->policy.target, s);
      });
      if (possible) kept.push_back(record);
    }
    live = std::move(kept);
  }

  DecisionResponse response;
  for (const auto& sub : subs) {
    AttributeResolver resolver(sub, providers_);

    std::vector<const PolicyRecord*> candidates;
    for (const auto* record : live)
      if (match_target(record->policy.target, sub)) candidates.push_back(record);
    std::sort(candidates.begin(), candidates.end(),
              [](const PolicyRecord* a, const PolicyRecord* b) {
                if (a->policy.priority != b->policy.priority)
                  return a->policy.priority > b->policy.priority;
                return a->policy.id < b->policy.id;  // documented tie-break
              });

    Decision final_decision = Decision::NotApplicable;
    std::vector<Obligation> final_obligations;
    bool settled = false;
    for (const auto* record : candidates) {
      const AuthzPolicy& policy = record->policy;
      TraceEntry entry;
      entry.resource_id = sub.resource_ids[0];
      entry.policy_id = policy.id;

      bool usable = true;
      if (policy.kind == PolicyKind::Delegated) {
        auto delegation = validate_delegation(policy, sub, store_);
        if (!delegation.authorized) {
          usable = false;  // unauthorized delegated policies are not applicable
        } else {
          entry.delegation_chain = std::move(delegation.chain);
        }
      }

      if (usable) {
        auto evaluation = evaluate_policy(policy, sub, resolver);
        entry.decision = evaluation.decision;
        if (!settled && evaluation.decision != Decision::NotApplicable) {
          final_decision = evaluation.decision;
          if (final_decision == Decision::Permit || final_decision == Decision::Deny)
            final_obligations = std::move(evaluation.obligations);
          settled = true;
        }
      } else {
        entry.decision = Decision::NotApplicable;
      }
      response.trace.push_back(std::move(entry));
    }

    response.results.push_back({sub.resource_ids[0], final_decision, final_obligations});
    for (const auto& note : resolver.notes()) response.resolution.push_back(note);
  }
  return response;
}

}  // namespace fedsec::pdp
