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

#include <random>

#include "helpers.hpp"

using namespace fedsec;
using namespace fedsec::gateway;
using namespace fedsec::testing;

namespace {

// A four-step ECP exercising transforms, state and utility calls.
Ecp four_step_ecp() {
  auto ecp = make_ecp(
      "main",
      {make_step("transform", Document{{"set", Document{{"stage1", true}}}}),
       make_step("encrypt-elements", Document{{"paths", Document::array({"payload.note"})}},
                 "keystore"),
       make_step("decrypt-elements", Document{{"paths", Document::array({"payload.note"})}},
                 "keystore"),
       make_step("audit-emit", Document{{"payload", Document{{"phase", "done"}}}})});
  ecp.state_schema = Document{{"count", 0}};
  ecp.steps[0].set_state["count"] = Document{{"#incr", 1}};
  return ecp;
}

Message random_message(std::mt19937& rng) {
  auto msg = client_message("alice", "wonderland", "/docs/r" + std::to_string(rng() % 50));
  msg.headers["correlation-id"] = "c-" + std::to_string(rng() % 1000);
  msg.body["payload"]["n"] = static_cast<std::int64_t>(rng() % 100);
  return msg;
}

std::string outcome_bytes(const ProcessResult& result) {
  return core::canonicalize(result.to_document());
}

}  // namespace

TEST_CASE("a one-node line is identical to the node itself") {
  GatewayFixture fx;
  auto bundle = fx.bundle_for(four_step_ecp());
  auto solo = fx.active_instance(bundle, "solo");
  auto line_node = fx.active_instance(bundle, "line0");
  InlineComposite line({line_node.get()}, {{0, 4, 0}});

  auto msg = client_message();
  CHECK(outcome_bytes(line.process(msg)) == outcome_bytes(solo->process(msg)));
}

TEST_CASE("two-node split of a four-step ecp equals single-node processing") {
  GatewayFixture fx;
  auto bundle = fx.bundle_for(four_step_ecp());
  auto solo = fx.active_instance(bundle, "solo");
  auto n0 = fx.active_instance(bundle, "n0");
  auto n1 = fx.active_instance(bundle, "n1");
  InlineComposite line({n0.get(), n1.get()}, {{0, 2, 0}, {2, 4, 1}});

  std::mt19937 rng(7);
  for (int i = 0; i < 25; ++i) {
    auto msg = random_message(rng);
    CAPTURE(i);
    REQUIRE(outcome_bytes(line.process(msg)) == outcome_bytes(solo->process(msg)));
  }
}

TEST_CASE("partition validation: gaps and overlaps are configuration errors") {
  GatewayFixture fx;
  auto bundle = fx.bundle_for(four_step_ecp());
  auto n0 = fx.active_instance(bundle, "n0");
  auto n1 = fx.active_instance(bundle, "n1");

  CHECK_THROWS_AS(InlineComposite({n0.get(), n1.get()}, {{0, 2, 0}, {3, 4, 1}}), PartitionGap);
  CHECK_THROWS_AS(InlineComposite({n0.get(), n1.get()}, {{0, 3, 0}, {2, 4, 1}}),
                  PartitionOverlap);
  CHECK_THROWS_AS(InlineComposite({n0.get(), n1.get()}, {{0, 3, 0}}), PartitionGap);

  // nodes must share the bundle
  auto other = fx.active_instance(fx.bundle_for(make_ecp("main", {})), "odd");
  CHECK_THROWS_AS(InlineComposite({n0.get(), other.get()}, {{0, 2, 0}, {2, 4, 1}}),
                  InvalidBundle);
}

TEST_CASE("cluster outcomes match single-node for both assignment policies") {
  for (auto policy : {Assignment::RoundRobin, Assignment::LeastLoaded,
                      Assignment::AffinityByAction}) {
    GatewayFixture fx;
    auto bundle = fx.bundle_for(four_step_ecp());
    auto solo = fx.active_instance(bundle, "solo");
    auto master = fx.active_instance(bundle, "master");
    auto w0 = fx.active_instance(bundle, "w0");
    auto w1 = fx.active_instance(bundle, "w1");
    ClusterComposite cluster(master.get(), {w0.get(), w1.get()}, policy);

    std::mt19937 rng(11);
    for (int i = 0; i < 10; ++i) {
      auto msg = random_message(rng);
      CAPTURE(static_cast<int>(policy));
      CAPTURE(i);
      REQUIRE(outcome_bytes(cluster.process(msg)) == outcome_bytes(solo->process(msg)));
    }
  }
}

TEST_CASE("master state is authoritative across assignments") {
  GatewayFixture fx;
  auto bundle = fx.bundle_for(four_step_ecp());
  auto master = fx.active_instance(bundle, "master");
  auto w0 = fx.active_instance(bundle, "w0");
  auto w1 = fx.active_instance(bundle, "w1");
  ClusterComposite cluster(master.get(), {w0.get(), w1.get()}, Assignment::RoundRobin);

  for (int i = 0; i < 3; ++i) cluster.process(client_message());
  CHECK(master->snapshot_states().at("main").at("count").get<std::int64_t>() == 3);
}

TEST_CASE("a worker dropped mid-chain is reassigned and the message still forwards") {
  GatewayFixture fx;
  auto bundle = fx.bundle_for(four_step_ecp());
  auto solo = fx.active_instance(bundle, "solo");
  auto master = fx.active_instance(bundle, "master");
  auto w0 = fx.active_instance(bundle, "w0");
  auto w1 = fx.active_instance(bundle, "w1");

  // drop w1 after the first message so a step that round-robin would give it
  // lands on w0 instead
  ClusterComposite cluster(master.get(), {w0.get(), w1.get()}, Assignment::RoundRobin);
  auto first = cluster.process(client_message());
  REQUIRE(first.forwarded());
  cluster.set_worker_available(1, false);
  auto second = cluster.process(client_message());
  CHECK(second.forwarded());
  auto expected = solo->process(client_message());
  solo->process(client_message());  // align solo's state with two processed messages
  CHECK(second.message.body == expected.message.body);
}

TEST_CASE("no available workers rejects with ClusterExhausted") {
  GatewayFixture fx;
  auto bundle = fx.bundle_for(four_step_ecp());
  auto master = fx.active_instance(bundle, "master");
  auto w0 = fx.active_instance(bundle, "w0");
  ClusterComposite cluster(master.get(), {w0.get()}, Assignment::LeastLoaded);
  cluster.set_worker_available(0, false);
  auto result = cluster.process(client_message());
  CHECK_FALSE(result.forwarded());
  CHECK(result.failure == "ClusterExhausted");
}

TEST_CASE("step failures inside a cluster reject the message normally") {
  GatewayFixture fx;
  auto ecp = make_ecp("main", {make_step("decrypt-elements",
                                         Document{{"paths", Document::array({"payload"})}},
                                         "keystore")});
  auto bundle = fx.bundle_for(ecp);
  auto master = fx.active_instance(bundle, "master");
  auto w0 = fx.active_instance(bundle, "w0");
  ClusterComposite cluster(master.get(), {w0.get()}, Assignment::RoundRobin);
  auto result = cluster.process(client_message());  // payload is not encrypted
  CHECK_FALSE(result.forwarded());
  CHECK(result.failure == "not-encrypted");
}
