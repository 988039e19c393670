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

#ifndef FEDSEC_HARNESS_RUNTIME_HPP_
#define FEDSEC_HARNESS_RUNTIME_HPP_

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "fedsec/gateway/instance.hpp"
#include "fedsec/harness/scenario.hpp"
#include "fedsec/pdp/engine.hpp"
#include "fedsec/sts/broker.hpp"

namespace fedsec::harness {

/// One simulated organization: its identity broker, authorization decision
/// point, egress/ingress gateways and hosted services.
struct Organization {
  std::string id;
  sts::BrokerPtr broker;
  std::shared_ptr<pdp::PolicyStore> store;
  std::vector<pdp::AttributeProviderPtr> providers;
  std::unique_ptr<gateway::GatewayInstance> egress;
  std::unique_ptr<gateway::GatewayInstance> ingress;
  std::vector<std::string> services;
};

/// A loaded multi-organization scenario: every component instantiated, trust
/// edges installed, bundles activated. Scenario runs are deterministic under
/// the frozen clock and seeded keys.
class ScenarioRuntime {
 public:
  static std::unique_ptr<ScenarioRuntime> load(const Document& scenario);
  static std::unique_ptr<ScenarioRuntime> load_file(const std::string& path);

  /// The end-to-end flow: client gateway (token issuance, element signing),
  /// in-process transfer, target gateway (token validation at its own
  /// broker, element verification, authorization), delivery to the hosted
  /// service. Returns the transcript; never throws for runtime outcomes.
  Document run_request(const ScriptStep& step);

  std::vector<Document> run_script();
  /// Same scripted requests, processed concurrently; transcripts come back
  /// in script order but interleaved identifiers may differ from the
  /// sequential run. Compare outcomes as multisets.
  std::vector<Document> run_script_concurrent();

  /// Probes validate_token for every ordered broker pair in the context
  /// using freshly issued self-tokens:
  /// {"context", "brokers": [...], "matrix": {validator: {issuer: bool}}}.
  Document validity_matrix(const std::string& context);

  /// Feeds gateway-originated events recorded since the last pump into the
  /// adaptation engine and executes fired actions.
  void pump_adaptation();
  const std::vector<AdaptationAction>& adaptation_actions() const { return fired_; }

  Organization& org(const std::string& id);
  const std::vector<ScriptStep>& script() const { return script_; }
  std::shared_ptr<core::EventLog> events() const { return events_; }
  std::shared_ptr<core::FixedClock> clock() const { return clock_; }
  const std::string& name() const { return name_; }
  const gateway::ServiceDirectory* directory() const { return &directory_; }

 private:
  ScenarioRuntime() = default;
  Document run_request_internal(const ScriptStep& step, const std::string& correlation_id);
  Document credential_for(const std::string& org_id, const std::string& context_ref,
                          const std::string& subject) const;

  std::string name_;
  std::shared_ptr<core::FixedClock> clock_;
  std::shared_ptr<core::EventLog> events_;
  gateway::ServiceDirectory directory_;
  std::map<std::string, core::KeyPair> principals_;
  std::map<std::string, Organization> orgs_;
  std::map<std::string, std::string> broker_to_org_;   // broker id -> org id
  std::map<std::string, std::string> gateway_to_org_;  // instance id -> org id
  // (org, context-reference) -> subject -> identity document
  std::map<std::string, std::map<std::string, Document>> identities_;
  std::vector<ScriptStep> script_;
  std::unique_ptr<AdaptationEngine> engine_;
  std::vector<AdaptationAction> fired_;
  std::size_t event_cursor_ = 0;
  int correlation_counter_ = 0;
  std::mutex run_mutex_;
};

}  // namespace fedsec::harness

#endif  // FEDSEC_HARNESS_RUNTIME_HPP_
