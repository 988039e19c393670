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

#ifndef FEDSEC_TESTS_PDP_ORACLE_HPP_
#define FEDSEC_TESTS_PDP_ORACLE_HPP_

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "fedsec/pdp/engine.hpp"
#include "fedsec/pdp/store.hpp"

// Brute-force reference for constrained delegation: instead of the engine's
// recursive search, enumerate every sequence of administrative policies up to
// the store size and test the authorization rules directly on each one.
namespace fedsec::testing {

inline bool oracle_admits(const pdp::DelegationConstraint& c, const pdp::AuthzPolicy& q) {
  if (!c.allowed_attribute_ids.empty())
    for (const auto& id : q.used_attribute_ids())
      if (!c.allowed_attribute_ids.count(id)) return false;
  if (!c.allowed_combining.empty() && !c.allowed_combining.count(q.combining)) return false;
  return pdp::target_subsumes(c.target_scope, q.target);
}

inline bool oracle_matches(const pdp::AuthzPolicy& admin, const pdp::DecisionRequest& base,
                           const std::string& delegate_id) {
  return pdp::match_target(admin.target, pdp::administrative_request(base, delegate_id));
}

/// Exhaustively enumerates admissible sequences [a1..ak]: a1 admits the
/// policy, each a(i+1) admits a(i), ak is anchored in a trusted authority.
/// Issuers of the policy and all non-anchor links must be pairwise distinct
/// (the cycle rule); non-anchor links must not be trusted-anchored themselves
/// (anchors terminate chains); the edge count is capped by the smallest
/// max-chain-depth in the sequence.
inline bool oracle_delegation_authorized(const pdp::AuthzPolicy& policy,
                                         const pdp::DecisionRequest& request,
                                         const pdp::PolicyStore& store) {
  if (!policy.issuer) return false;
  const std::int64_t now = store.clock().now_unix();
  std::vector<const pdp::AuthzPolicy*> admins;
  for (const auto& [id, record] : store.delegated_compartment())
    if (record.policy.kind == pdp::PolicyKind::Administrative && record.enabled &&
        record.policy.in_validity(now))
      admins.push_back(&record.policy);

  const auto& trusted = store.trusted_authorities();
  auto anchored = [&](const pdp::AuthzPolicy* a) {
    return a->issuer && trusted.count(*a->issuer) != 0;
  };

  // Frontier of extension-valid sequences: every non-tail link is
  // non-anchored and the issuers {policy, a1..a(k-1)} are pairwise distinct
  // (the cycle rule). Chains whose tail is anchored are final candidates.
  std::vector<std::vector<const pdp::AuthzPolicy*>> frontier;
  for (const auto* a : admins)
    if (oracle_matches(*a, request, *policy.issuer) && a->constraint &&
        oracle_admits(*a->constraint, policy))
      frontier.push_back({a});

  auto passes_cap = [](const std::vector<const pdp::AuthzPolicy*>& seq) {
    int cap = INT32_MAX;
    for (const auto* a : seq) cap = std::min(cap, a->constraint->max_chain_depth);
    return static_cast<int>(seq.size()) <= cap;  // edges == sequence length
  };

  while (!frontier.empty()) {
    for (const auto& seq : frontier)
      if (anchored(seq.back()) && passes_cap(seq)) return true;

    std::vector<std::vector<const pdp::AuthzPolicy*>> next_frontier;
    for (const auto& seq : frontier) {
      const pdp::AuthzPolicy* tail = seq.back();
      if (anchored(tail)) continue;  // trusted links only anchor, never extend
      std::set<std::string> used{*policy.issuer};
      for (std::size_t i = 0; i + 1 < seq.size(); ++i) used.insert(*seq[i]->issuer);
      if (!tail->issuer || used.count(*tail->issuer)) continue;  // cycle
      for (const auto* a : admins) {
        if (!oracle_matches(*a, request, *tail->issuer)) continue;
        if (!a->constraint || !oracle_admits(*a->constraint, *tail)) continue;
        auto next = seq;
        next.push_back(a);
        next_frontier.push_back(std::move(next));
      }
    }
    frontier = std::move(next_frontier);
  }
  return false;
}

/// Reference decide(): same rule evaluation, but delegation goes through the
/// brute-force enumerator and the cross-policy combination is restated as a
/// max-priority selection.
inline pdp::DecisionResponse oracle_decide(const pdp::DecisionRequest& request,
                                           const pdp::PolicyStore& store,
                                           const std::vector<pdp::AttributeProviderPtr>& providers) {
  pdp::DecisionResponse response;
  const std::int64_t now = store.clock().now_unix();
  for (const auto& sub : pdp::preprocess(request)) {
    pdp::AttributeResolver resolver(sub, providers);
    struct Row {
      const pdp::AuthzPolicy* policy;
      pdp::Decision decision;
      std::vector<pdp::Obligation> obligations;
    };
    std::vector<Row> rows;
    for (const auto* compartment : {&store.root_compartment(), &store.delegated_compartment()}) {
      for (const auto& [id, record] : *compartment) {
        const auto& p = record.policy;
        if (p.kind == pdp::PolicyKind::Administrative) continue;
        if (!record.enabled || !p.in_validity(now)) continue;
        if (!pdp::match_target(p.target, sub)) continue;
        if (p.kind == pdp::PolicyKind::Delegated &&
            !oracle_delegation_authorized(p, sub, store)) {
          rows.push_back({&p, pdp::Decision::NotApplicable, {}});
          continue;
        }
        auto eval = pdp::evaluate_policy(p, sub, resolver);
        rows.push_back({&p, eval.decision, std::move(eval.obligations)});
      }
    }
    const Row* winner = nullptr;
    for (const auto& row : rows) {
      if (row.decision == pdp::Decision::NotApplicable) continue;
      if (!winner || row.policy->priority > winner->policy->priority ||
          (row.policy->priority == winner->policy->priority &&
           row.policy->id < winner->policy->id))
        winner = &row;
    }
    pdp::ResourceDecision rd;
    rd.resource_id = sub.resource_ids[0];
    rd.decision = winner ? winner->decision : pdp::Decision::NotApplicable;
    if (winner &&
        (winner->decision == pdp::Decision::Permit || winner->decision == pdp::Decision::Deny))
      rd.obligations = winner->obligations;
    response.results.push_back(std::move(rd));
  }
  return response;
}

}  // namespace fedsec::testing

#endif  // FEDSEC_TESTS_PDP_ORACLE_HPP_
