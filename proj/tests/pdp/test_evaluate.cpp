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

#include "helpers.hpp"

using namespace fedsec;
using namespace fedsec::pdp;
using namespace fedsec::testing;
using core::Value;

namespace {

/// Counts calls; optionally fails or returns a fixed bag.
class ProbeProvider final : public AttributeProvider {
 public:
  ProbeProvider(std::string name, std::map<std::string, std::vector<Value>> values,
                bool throws = false)
      : name_(std::move(name)), values_(std::move(values)), throws_(throws) {}

  std::string name() const override { return name_; }
  std::vector<Value> resolve(const std::string& id, const DecisionRequest&) override {
    ++calls;
    if (throws_) throw std::runtime_error("provider down");
    auto it = values_.find(id);
    return it == values_.end() ? std::vector<Value>{} : it->second;
  }

  int calls = 0;

 private:
  std::string name_;
  std::map<std::string, std::vector<Value>> values_;
  bool throws_;
};

}  // namespace

TEST_CASE("permit rule without condition permits when target matches") {
  auto p = access_policy("p1", PolicyKind::Root, TargetMatcher{}, Effect::Permit);
  auto req = simple_request("alice", "read", "/docs/r1");
  std::vector<AttributeProviderPtr> none;
  AttributeResolver resolver(req, none);
  CHECK(evaluate_policy(p, req, resolver).decision == Decision::Permit);
}

TEST_CASE("target mismatch is NotApplicable") {
  auto p = access_policy("p1", PolicyKind::Root,
                         TargetMatcher{{clause_prefix("resource.path", "/other/")}},
                         Effect::Permit);
  auto req = simple_request("alice", "read", "/docs/r1");
  std::vector<AttributeProviderPtr> none;
  AttributeResolver resolver(req, none);
  CHECK(evaluate_policy(p, req, resolver).decision == Decision::NotApplicable);
}

TEST_CASE("deny-overrides across rules") {
  AuthzPolicy p;
  p.id = "p1";
  p.kind = PolicyKind::Root;
  p.combining = CombiningAlg::DenyOverrides;
  p.not_before = 0;
  p.not_after = kFarFuture;
  p.rules.push_back(Rule{"allow", Effect::Permit, std::nullopt, {}});
  p.rules.push_back(Rule{"forbid", Effect::Deny, std::nullopt, {}});

  auto req = simple_request("alice", "read", "/docs/r1");
  std::vector<AttributeProviderPtr> none;
  AttributeResolver resolver(req, none);
  CHECK(evaluate_policy(p, req, resolver).decision == Decision::Deny);
}

TEST_CASE("missing attribute in a live condition yields Indeterminate") {
  AuthzPolicy p;
  p.id = "p1";
  p.kind = PolicyKind::Root;
  p.not_before = 0;
  p.not_after = kFarFuture;
  Rule r{"r0", Effect::Permit,
         Condition::compare("environment.threat-level", CompareOp::Le, std::int64_t{2}),
         {}};
  p.rules.push_back(std::move(r));

  auto req = simple_request("alice", "read", "/docs/r1");
  std::vector<AttributeProviderPtr> none;
  AttributeResolver resolver(req, none);
  CHECK(evaluate_policy(p, req, resolver).decision == Decision::Indeterminate);
}

TEST_CASE("false condition makes the rule not applicable") {
  AuthzPolicy p;
  p.id = "p1";
  p.kind = PolicyKind::Root;
  p.not_before = 0;
  p.not_after = kFarFuture;
  p.rules.push_back(Rule{
      "r0", Effect::Permit,
      Condition::compare("subject.role", CompareOp::Eq, std::string("ops")), {}});

  auto req = simple_request("alice", "read", "/docs/r1");  // subject.role=dev
  std::vector<AttributeProviderPtr> none;
  AttributeResolver resolver(req, none);
  CHECK(evaluate_policy(p, req, resolver).decision == Decision::NotApplicable);
}

TEST_CASE("boolean connectives with three-valued semantics") {
  auto req = simple_request("alice", "read", "/docs/r1");
  std::vector<AttributeProviderPtr> none;

  auto eval = [&](Condition c) {
    AuthzPolicy p;
    p.id = "p";
    p.kind = PolicyKind::Root;
    p.not_before = 0;
    p.not_after = kFarFuture;
    p.rules.push_back(Rule{"r", Effect::Permit, std::move(c), {}});
    AttributeResolver resolver(req, none);
    return evaluate_policy(p, req, resolver).decision;
  };

  auto is_dev = Condition::compare("subject.role", CompareOp::Eq, std::string("dev"));
  auto missing = Condition::compare("environment.x", CompareOp::Eq, std::string("y"));

  CHECK(eval(Condition::all_of({is_dev, is_dev})) == Decision::Permit);
  CHECK(eval(Condition::all_of({is_dev, Condition::negate(is_dev)})) == Decision::NotApplicable);
  CHECK(eval(Condition::all_of({is_dev, missing})) == Decision::Indeterminate);
  CHECK(eval(Condition::any_of({Condition::negate(is_dev), missing})) == Decision::Indeterminate);
  CHECK(eval(Condition::any_of({is_dev, missing})) == Decision::Permit);
  CHECK(eval(Condition::negate(missing)) == Decision::Indeterminate);
}

TEST_CASE("obligations come from the rules that produced the decision") {
  AuthzPolicy p;
  p.id = "p1";
  p.kind = PolicyKind::Root;
  p.combining = CombiningAlg::DenyOverrides;
  p.not_before = 0;
  p.not_after = kFarFuture;
  Rule permit{"allow", Effect::Permit, std::nullopt, {Obligation{"emit-audit", {}, ""}}};
  Rule deny{"forbid", Effect::Deny,
            Condition::compare("subject.role", CompareOp::Eq, std::string("dev")),
            {Obligation{"annotate", {{"reason", "dev-deny"}}, ""}}};
  p.rules.push_back(permit);
  p.rules.push_back(deny);

  auto req = simple_request("alice", "read", "/docs/r1");
  std::vector<AttributeProviderPtr> none;
  AttributeResolver resolver(req, none);
  auto eval = evaluate_policy(p, req, resolver);
  CHECK(eval.decision == Decision::Deny);
  REQUIRE(eval.obligations.size() == 1);
  CHECK(eval.obligations[0].id == "annotate");
}

TEST_CASE("request attributes take precedence over providers") {
  auto p1 = std::make_shared<ProbeProvider>(
      "p1", std::map<std::string, std::vector<Value>>{{"subject.role", {Value(std::string("ops"))}}});
  std::vector<AttributeProviderPtr> providers{p1};
  auto req = simple_request("alice", "read", "/docs/r1");  // carries subject.role=dev
  AttributeResolver resolver(req, providers);
  auto bag = resolver.lookup("subject.role");
  REQUIRE(bag.size() == 1);
  CHECK(bag[0] == Value(std::string("dev")));
  CHECK(p1->calls == 0);  // provider never consulted
}

TEST_CASE("providers consulted in order; first non-empty wins; results cached") {
  auto p1 = std::make_shared<ProbeProvider>("p1", std::map<std::string, std::vector<Value>>{});
  auto p2 = std::make_shared<ProbeProvider>(
      "p2", std::map<std::string, std::vector<Value>>{
                {"environment.region", {Value(std::string("eu"))}}});
  std::vector<AttributeProviderPtr> providers{p1, p2};
  auto req = simple_request("alice", "read", "/docs/r1");
  AttributeResolver resolver(req, providers);

  auto bag = resolver.lookup("environment.region");
  REQUIRE(bag.size() == 1);
  CHECK(bag[0] == Value(std::string("eu")));
  CHECK(p1->calls == 1);
  CHECK(p2->calls == 1);

  resolver.lookup("environment.region");  // cached
  CHECK(p1->calls == 1);
  CHECK(p2->calls == 1);
}

TEST_CASE("provider failure is recorded and surfaces as Indeterminate") {
  auto p1 = std::make_shared<ProbeProvider>("p1", std::map<std::string, std::vector<Value>>{},
                                            /*throws=*/true);
  std::vector<AttributeProviderPtr> providers{p1};
  auto req = simple_request("alice", "read", "/docs/r1");
  AttributeResolver resolver(req, providers);

  AuthzPolicy p;
  p.id = "p";
  p.kind = PolicyKind::Root;
  p.not_before = 0;
  p.not_after = kFarFuture;
  p.rules.push_back(Rule{
      "r", Effect::Permit,
      Condition::compare("environment.region", CompareOp::Eq, std::string("eu")), {}});
  CHECK(evaluate_policy(p, req, resolver).decision == Decision::Indeterminate);
  REQUIRE(resolver.notes().size() == 1);
  CHECK(resolver.notes()[0].failed);
  CHECK(resolver.notes()[0].provider == "p1");
}
