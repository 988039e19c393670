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

#ifndef FEDSEC_TESTS_PDP_HELPERS_HPP_
#define FEDSEC_TESTS_PDP_HELPERS_HPP_

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "fedsec/core/clock.hpp"
#include "fedsec/core/keys.hpp"
#include "fedsec/core/signed_document.hpp"
#include "fedsec/pdp/engine.hpp"
#include "fedsec/pdp/store.hpp"

namespace fedsec::testing {

constexpr std::int64_t kNow = 1'700'000'000;
constexpr std::int64_t kFarFuture = 2'000'000'000;

struct PdpFixture {
  std::map<std::string, core::KeyPair> keys;
  core::KeyRegistry registry;
  std::shared_ptr<core::FixedClock> clock = std::make_shared<core::FixedClock>(kNow);

  explicit PdpFixture(const std::vector<std::string>& principals = {"authT", "adminA", "adminB",
                                                                    "adminC"}) {
    for (const auto& id : principals) {
      keys.emplace(id, core::KeyPair::from_seed("fixture-" + id));
      registry.add(id, keys.at(id).public_key);
    }
  }

  pdp::PolicyStore make_store(std::set<std::string> trusted = {"authT"}) const {
    return pdp::PolicyStore(registry, std::move(trusted), clock);
  }

  core::SignedDocument sign(const pdp::AuthzPolicy& policy, const std::string& signer) const {
    return core::SignedDocument::seal(policy.body_document(), signer, keys.at(signer));
  }
};

inline pdp::TargetClause clause_eq(const std::string& attr, core::Value v) {
  return pdp::TargetClause{attr, pdp::MatchOp::Equals, {std::move(v)}};
}

inline pdp::TargetClause clause_prefix(const std::string& attr, const std::string& prefix) {
  return pdp::TargetClause{attr, pdp::MatchOp::Prefix, {core::Value(prefix)}};
}

inline pdp::AuthzPolicy access_policy(const std::string& id, pdp::PolicyKind kind,
                                      pdp::TargetMatcher target, pdp::Effect effect,
                                      std::int64_t priority = 0) {
  pdp::AuthzPolicy p;
  p.id = id;
  p.kind = kind;
  p.priority = priority;
  p.target = std::move(target);
  p.combining = pdp::CombiningAlg::PriorityOverride;
  p.not_before = 0;
  p.not_after = kFarFuture;
  pdp::Rule rule;
  rule.id = id + ".r0";
  rule.effect = effect;
  p.rules.push_back(std::move(rule));
  return p;
}

inline pdp::AuthzPolicy admin_policy(const std::string& id, const std::string& delegate_id,
                                     pdp::TargetMatcher extra_target,
                                     pdp::DelegationConstraint constraint) {
  pdp::AuthzPolicy p;
  p.id = id;
  p.kind = pdp::PolicyKind::Administrative;
  p.target = std::move(extra_target);
  p.target.clauses.insert(p.target.clauses.begin(),
                          clause_eq("delegate.id", core::Value(delegate_id)));
  p.not_before = 0;
  p.not_after = kFarFuture;
  p.constraint = std::move(constraint);
  return p;
}

inline pdp::DecisionRequest simple_request(const std::string& subject, const std::string& action,
                                           const std::string& path) {
  using core::Attribute;
  using core::AttributeCategory;
  return pdp::DecisionRequest::make(
      {Attribute(AttributeCategory::Subject, "subject.id", subject),
       Attribute(AttributeCategory::Subject, "subject.role", std::string("dev")),
       Attribute(AttributeCategory::Action, "action.id", action),
       Attribute(AttributeCategory::Resource, "resource.path", path)},
      "ctx-1", {path});
}

}  // namespace fedsec::testing

#endif  // FEDSEC_TESTS_PDP_HELPERS_HPP_
