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

#include "oracle.hpp"
#include "random_store.hpp"

using namespace fedsec;
using namespace fedsec::pdp;
using namespace fedsec::testing;
using core::Attribute;
using core::AttributeCategory;

namespace {

bool same_outcomes(const DecisionResponse& a, const DecisionResponse& b) {
  if (a.results.size() != b.results.size()) return false;
  for (std::size_t i = 0; i < a.results.size(); ++i) {
    if (a.results[i].resource_id != b.results[i].resource_id) return false;
    if (a.results[i].decision != b.results[i].decision) return false;
    if (a.results[i].obligations.size() != b.results[i].obligations.size()) return false;
    for (std::size_t j = 0; j < a.results[i].obligations.size(); ++j)
      if (!(a.results[i].obligations[j] == b.results[i].obligations[j])) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("empty store: NotApplicable for every resource") {
  PdpFixture fx;
  auto store = fx.make_store();
  DecisionEngine engine(store);
  auto req = DecisionRequest::make(
      {Attribute(AttributeCategory::Subject, "subject.id", std::string("alice")),
       Attribute(AttributeCategory::Action, "action.id", std::string("read"))},
      "ctx", {"r1", "r2"});
  auto response = engine.decide(req);
  REQUIRE(response.results.size() == 2);
  for (const auto& r : response.results) CHECK(r.decision == Decision::NotApplicable);
  CHECK(response.trace.empty());
}

TEST_CASE("malformed requests throw RequestError") {
  PdpFixture fx;
  auto store = fx.make_store();
  DecisionEngine engine(store);
  DecisionRequest bad;  // no attributes, no resources
  CHECK_THROWS_AS(engine.decide(bad), RequestError);
  CHECK_THROWS_AS(
      DecisionRequest::make({Attribute(AttributeCategory::Subject, "subject.id",
                                       std::string("alice"))},
                            "ctx", {"r"}),
      RequestError);
  CHECK_THROWS_AS(
      DecisionRequest::make({Attribute(AttributeCategory::Subject, "subject.id",
                                       std::string("alice")),
                             Attribute(AttributeCategory::Action, "action.id",
                                       std::string("read")),
                             Attribute(AttributeCategory::Delegate, "delegate.id",
                                       std::string("x"))},
                            "ctx", {"r"}),
      RequestError);
}

TEST_CASE("delegated permit flows through with its chain in the trace") {
  PdpFixture fx;
  auto store = fx.make_store();
  DelegationConstraint constraint;
  constraint.target_scope.clauses.push_back(clause_prefix("resource.path", "/docs/"));
  store.load(fx.sign(admin_policy("admin-docs", "adminA", {}, constraint), "authT"));
  store.load(fx.sign(access_policy("del-docs", PolicyKind::Delegated,
                                   TargetMatcher{{clause_prefix("resource.path", "/docs/")}},
                                   Effect::Permit),
                     "adminA"));

  DecisionEngine engine(store);
  auto response = engine.decide(simple_request("alice", "read", "/docs/r1"));
  REQUIRE(response.results.size() == 1);
  CHECK(response.results[0].decision == Decision::Permit);
  REQUIRE(response.trace.size() == 1);
  CHECK(response.trace[0].policy_id == "del-docs");
  CHECK(response.trace[0].delegation_chain ==
        std::vector<std::string>{"admin-docs", "del-docs"});
}

TEST_CASE("higher-priority root deny overrides an overlapping delegated permit") {
  PdpFixture fx;
  auto store = fx.make_store();
  DelegationConstraint constraint;
  store.load(fx.sign(admin_policy("anchor", "adminA", {}, constraint), "authT"));
  store.load(fx.sign(access_policy("del-permit", PolicyKind::Delegated,
                                   TargetMatcher{{clause_prefix("resource.path", "/docs/")}},
                                   Effect::Permit, /*priority=*/1),
                     "adminA"));
  auto deny = access_policy("root-deny", PolicyKind::Root,
                            TargetMatcher{{clause_prefix("resource.path", "/docs/secret/")}},
                            Effect::Deny, /*priority=*/10);
  store.load(fx.sign(deny, "authT"));

  DecisionEngine engine(store);
  // overlap: the higher-priority deny wins
  auto overlapped = engine.decide(simple_request("alice", "read", "/docs/secret/r"));
  CHECK(overlapped.results[0].decision == Decision::Deny);
  // outside the overlap the lower-priority permit still applies
  auto outside = engine.decide(simple_request("alice", "read", "/docs/public/r"));
  CHECK(outside.results[0].decision == Decision::Permit);
  // oracle agrees on both
  CHECK(same_outcomes(overlapped, oracle_decide(simple_request("alice", "read", "/docs/secret/r"),
                                                store, {})));
  CHECK(same_outcomes(outside, oracle_decide(simple_request("alice", "read", "/docs/public/r"),
                                             store, {})));
}

TEST_CASE("priority-override localization: non-matching high-priority policy is a no-op") {
  PdpFixture fx;
  auto with_high = fx.make_store();
  auto without_high = fx.make_store();

  auto low = access_policy("low", PolicyKind::Root,
                           TargetMatcher{{clause_prefix("resource.path", "/a/")}},
                           Effect::Permit, 1);
  auto high = access_policy("high", PolicyKind::Root,
                            TargetMatcher{{clause_prefix("resource.path", "/b/")}},
                            Effect::Deny, 9);
  with_high.load(fx.sign(low, "authT"));
  with_high.load(fx.sign(high, "authT"));
  without_high.load(fx.sign(low, "authT"));

  auto req = simple_request("alice", "read", "/a/r");
  auto a = DecisionEngine(with_high).decide(req);
  auto b = DecisionEngine(without_high).decide(req);
  CHECK(a.results[0].decision == b.results[0].decision);
  CHECK(a.results[0].decision == Decision::Permit);
}

TEST_CASE("duplicate resource ids are decided once") {
  PdpFixture fx;
  auto store = fx.make_store();
  store.load(fx.sign(access_policy("root-1", PolicyKind::Root, TargetMatcher{}, Effect::Permit),
                     "authT"));
  DecisionEngine engine(store);
  auto req = DecisionRequest::make(
      {Attribute(AttributeCategory::Subject, "subject.id", std::string("alice")),
       Attribute(AttributeCategory::Action, "action.id", std::string("read"))},
      "ctx", {"r1", "r2", "r1"});
  auto response = engine.decide(req);
  REQUIRE(response.results.size() == 2);
  CHECK(response.results[0].resource_id == "r1");
  CHECK(response.results[1].resource_id == "r2");
}

TEST_CASE("preprocess keeps one request per resource with shared attributes") {
  auto req = DecisionRequest::make(
      {Attribute(AttributeCategory::Subject, "subject.id", std::string("alice")),
       Attribute(AttributeCategory::Subject, "subject.role", std::string("dev")),
       Attribute(AttributeCategory::Action, "action.id", std::string("read"))},
      "ctx", {"r1", "r2", "r3"});
  auto subs = preprocess(req);
  REQUIRE(subs.size() == 3);
  for (std::size_t i = 0; i < subs.size(); ++i) {
    CHECK(subs[i].resource_ids == std::vector<std::string>{req.resource_ids[i]});
    CHECK(subs[i].values_of("subject.role") ==
          std::vector<core::Value>{core::Value(std::string("dev"))});
    CHECK(subs[i].values_of("resource.id") ==
          std::vector<core::Value>{core::Value(req.resource_ids[i])});
  }

  // single resource: identity
  auto one = DecisionRequest::make(
      {Attribute(AttributeCategory::Subject, "subject.id", std::string("alice")),
       Attribute(AttributeCategory::Action, "action.id", std::string("read"))},
      "ctx", {"r1"});
  auto same = preprocess(one);
  REQUIRE(same.size() == 1);
  CHECK(same[0].to_document() == one.to_document());
}

TEST_CASE("disable excludes a policy from decisions; removal is equivalent") {
  PdpFixture fx;
  auto store = fx.make_store();
  store.pap_add("authT",
                fx.sign(access_policy("root-1", PolicyKind::Root, TargetMatcher{},
                                      Effect::Permit),
                        "authT"));
  store.pap_add("adminA",
                fx.sign(access_policy("del-1", PolicyKind::Delegated, TargetMatcher{},
                                      Effect::Deny, 5),
                        "adminA"));
  store.load(fx.sign(admin_policy("anchor", "adminA", {}, DelegationConstraint{}), "authT"));

  auto req = simple_request("alice", "read", "/docs/r1");
  CHECK(DecisionEngine(store).decide(req).results[0].decision == Decision::Deny);

  store.pap_disable("adminA", "del-1");
  auto disabled = DecisionEngine(store).decide(req);
  CHECK(disabled.results[0].decision == Decision::Permit);

  // equivalent to a store never containing the policy
  auto bare = fx.make_store();
  bare.load(fx.sign(access_policy("root-1", PolicyKind::Root, TargetMatcher{}, Effect::Permit),
                    "authT"));
  bare.load(fx.sign(admin_policy("anchor", "adminA", {}, DelegationConstraint{}), "authT"));
  CHECK(same_outcomes(disabled, DecisionEngine(bare).decide(req)));
}

TEST_CASE("expired policies stop affecting decisions but stay listed") {
  PdpFixture fx;
  auto store = fx.make_store();
  auto policy = access_policy("short", PolicyKind::Root, TargetMatcher{}, Effect::Deny, 10);
  policy.not_after = kNow + 5;
  store.load(fx.sign(policy, "authT"));
  store.load(fx.sign(access_policy("long", PolicyKind::Root, TargetMatcher{}, Effect::Permit),
                     "authT"));

  auto req = simple_request("alice", "read", "/r");
  CHECK(DecisionEngine(store).decide(req).results[0].decision == Decision::Deny);
  fx.clock->advance(100);
  CHECK(DecisionEngine(store).decide(req).results[0].decision == Decision::Permit);
  CHECK(store.pap_list("authT").size() == 2);
}

TEST_CASE("partial-evaluation pre-filter never changes the response") {
  PdpFixture fx;
  std::mt19937 rng(4242);
  for (int i = 0; i < 100; ++i) {
    auto store = random_store(rng, fx);
    auto req = random_request(rng);
    auto plain = DecisionEngine(store, {}, EngineOptions{false}).decide(req);
    auto filtered = DecisionEngine(store, {}, EngineOptions{true}).decide(req);
    REQUIRE(core::canonicalize(plain.to_document()) ==
            core::canonicalize(filtered.to_document()));
  }
}

TEST_CASE("decide is deterministic for a fixed store snapshot") {
  PdpFixture fx;
  std::mt19937 rng(99);
  auto store = random_store(rng, fx);
  auto req = random_request(rng);
  auto a = DecisionEngine(store).decide(req);
  auto b = DecisionEngine(store).decide(req);
  CHECK(core::canonicalize(a.to_document()) == core::canonicalize(b.to_document()));
}

TEST_CASE("randomized equivalence of decide() with the brute-force reference") {
  PdpFixture fx;
  std::mt19937 rng(31337);
  for (int i = 0; i < 300; ++i) {
    auto store = random_store(rng, fx);
    auto req = random_request(rng);
    auto engine = DecisionEngine(store).decide(req);
    auto reference = oracle_decide(req, store, {});
    CAPTURE(i);
    REQUIRE(same_outcomes(engine, reference));
  }
}

TEST_CASE("removing the root anchor flips dependent decisions only") {
  PdpFixture fx;
  std::mt19937 rng(555);
  int flipped = 0;
  for (int i = 0; i < 150; ++i) {
    auto store = random_store(rng, fx);
    auto req = random_request(rng);
    auto before = DecisionEngine(store).decide(req);

    // drop every anchored administrative policy
    std::vector<std::string> anchors;
    for (const auto& [id, record] : store.delegated_compartment())
      if (record.policy.kind == PolicyKind::Administrative && record.policy.issuer &&
          store.trusted_authorities().count(*record.policy.issuer))
        anchors.push_back(id);
    for (const auto& id : anchors) store.pap_remove("authT", id);

    auto after = DecisionEngine(store).decide(req);

    // reference: same store, but also without any delegated policies that
    // previously appeared with a chain in the trace
    for (std::size_t r = 0; r < before.results.size(); ++r) {
      const auto& rid = before.results[r].resource_id;
      // delegated policies whose chains died must now contribute nothing
      for (const auto& entry : before.trace) {
        if (entry.resource_id != rid || entry.delegation_chain.empty()) continue;
        // after anchor removal this policy must trace as NotApplicable
        for (const auto& after_entry : after.trace) {
          if (after_entry.resource_id == rid && after_entry.policy_id == entry.policy_id) {
            CHECK(after_entry.decision == Decision::NotApplicable);
            CHECK(after_entry.delegation_chain.empty());
          }
        }
      }
      if (before.results[r].decision != after.results[r].decision) ++flipped;
    }
  }
  CHECK(flipped > 0);  // the sweep has to hit real dependents now and then
}
