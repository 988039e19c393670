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

#ifndef FEDSEC_TESTS_GATEWAY_HELPERS_HPP_
#define FEDSEC_TESTS_GATEWAY_HELPERS_HPP_

#include <memory>
#include <string>

#include "fedsec/gateway/aggregate.hpp"
#include "fedsec/gateway/instance.hpp"
#include "fedsec/pdp/engine.hpp"
#include "fedsec/sts/broker.hpp"

namespace fedsec::testing {

using core::Document;

// One organization's worth of services plus helpers to build instances.
struct GatewayFixture {
  std::shared_ptr<core::FixedClock> clock = std::make_shared<core::FixedClock>(1'700'000'000);
  std::shared_ptr<core::EventLog> log = std::make_shared<core::EventLog>(clock);
  gateway::ServiceDirectory directory;
  sts::BrokerPtr broker;
  std::shared_ptr<pdp::PolicyStore> store;
  core::Bytes element_key = core::derive_seed({0x42}, "element-key");

  GatewayFixture() {
    Document context{
        {"federation", "F1"},
        {"selector", Document{{"context-reference", "F1"}}},
        {"providers",
         Document{{"authentication", Document{{"scheme", "shared-secret"}}},
                  {"identities",
                   Document::array({Document{{"subject", "alice"},
                                             {"secret", "wonderland"},
                                             {"attributes", Document{{"role", "engineer"}}}},
                                    Document{{"subject", "mallory"},
                                             {"secret", "m"},
                                             {"attributes", Document{{"role", "intern"}}}}})},
                  {"transform", Document::array({Document{{"from", "role"}, {"to", "urn:role"}}})},
                  {"validity", Document{{"lifetime", 3600}}}}}};
    broker = sts::Broker::from_document(Document{{"broker", "IB1"},
                                                 {"seed", "seed-ib1"},
                                                 {"administrators", Document::array({"ops"})},
                                                 {"contexts", Document::array({context})}},
                                        clock, log);

    auto authority = core::KeyPair::from_seed("fixture-authT");
    core::KeyRegistry registry;
    registry.add("authT", authority.public_key);
    store = std::make_shared<pdp::PolicyStore>(registry, std::set<std::string>{"authT"}, clock);
    pdp::AuthzPolicy policy;
    policy.id = "allow-engineers";
    policy.kind = pdp::PolicyKind::Root;
    policy.not_before = 0;
    policy.not_after = 2'000'000'000;
    policy.target.clauses.push_back(
        pdp::TargetClause{"urn:role", pdp::MatchOp::Equals, {core::Value(std::string("engineer"))}});
    policy.target.clauses.push_back(
        pdp::TargetClause{"resource.id", pdp::MatchOp::Prefix, {core::Value(std::string("/docs/"))}});
    policy.rules.push_back(pdp::Rule{"permit", pdp::Effect::Permit, std::nullopt, {}});
    store->load(core::SignedDocument::seal(policy.body_document(), "authT", authority));

    directory.register_service("svc://org/sts", gateway::make_sts_service(broker));
    directory.register_service("svc://org/pdp", gateway::make_pdp_service(store));
    directory.register_service("svc://org/keystore", gateway::make_keystore_service(element_key));
  }

  gateway::Usp full_usp() const {
    gateway::Usp usp;
    usp.refs["sts"] = gateway::UspEntry{core::EndpointReference("svc://org/sts"), 1000, 1, "sts"};
    usp.refs["pdp"] = gateway::UspEntry{core::EndpointReference("svc://org/pdp"), 1000, 0, "pdp"};
    usp.refs["keystore"] =
        gateway::UspEntry{core::EndpointReference("svc://org/keystore"), 1000, 0, "keystore"};
    return usp;
  }

  gateway::Bundle bundle_for(gateway::Ecp ecp) const {
    gateway::Bundle bundle;
    bundle.ecps.emplace(ecp.id, std::move(ecp));
    bundle.irp = gateway::builtin_irp();
    bundle.usp = full_usp();
    for (const auto& [id, e] : bundle.ecps) bundle.ceps.push_back(gateway::derive_cep(e));
    return bundle;
  }

  std::unique_ptr<gateway::GatewayInstance> active_instance(const gateway::Bundle& bundle,
                                                            const std::string& id = "gw") {
    auto instance =
        std::make_unique<gateway::GatewayInstance>(id, &directory, log, clock);
    instance->lifecycle(gateway::LifecycleOp::Load, &bundle);
    instance->lifecycle(gateway::LifecycleOp::Activate);
    return instance;
  }
};

inline gateway::Step make_step(const std::string& action, Document params = Document::object(),
                               const std::string& usp_ref = "") {
  gateway::Step step;
  step.action = action;
  step.params = std::move(params);
  step.usp_ref = usp_ref;
  return step;
}

inline gateway::Ecp make_ecp(const std::string& id, std::vector<gateway::Step> steps) {
  gateway::Ecp ecp;
  ecp.id = id;
  ecp.steps = std::move(steps);
  return ecp;
}

inline gateway::Message client_message(const std::string& subject = "alice",
                                       const std::string& secret = "wonderland",
                                       const std::string& resource = "/docs/r1") {
  gateway::Message msg;
  msg.direction = gateway::Message::Direction::Outbound;
  msg.headers = {{"action", "read"},       {"context-reference", "F1"},
                 {"correlation-id", "c-1"}, {"credential", secret},
                 {"resource", resource},    {"subject", subject}};
  msg.body = Document{{"payload", Document{{"resource", resource}, {"note", "hello"}}}};
  return msg;
}

}  // namespace fedsec::testing

#endif  // FEDSEC_TESTS_GATEWAY_HELPERS_HPP_
