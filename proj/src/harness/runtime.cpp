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

#include "fedsec/harness/runtime.hpp"

#include <algorithm>
#include <future>

#include "fedsec/gateway/services.hpp"

namespace fedsec::harness {

namespace {

using gateway::Bundle;
using gateway::Ecp;
using gateway::Step;
using gateway::UspEntry;

Step simple_step(const std::string& action, Document params = Document::object(),
                 const std::string& usp_ref = "") {
  Step step;
  step.action = action;
  step.params = std::move(params);
  step.usp_ref = usp_ref;
  return step;
}

gateway::Usp org_usp(const std::string& org_id) {
  gateway::Usp usp;
  usp.refs["sts"] =
      UspEntry{core::EndpointReference("svc://" + org_id + "/sts"), 1000, 1, "sts"};
  usp.refs["pdp"] =
      UspEntry{core::EndpointReference("svc://" + org_id + "/pdp"), 1000, 0, "pdp"};
  usp.refs["keystore"] =
      UspEntry{core::EndpointReference("svc://" + org_id + "/keystore"), 1000, 0, "keystore"};
  return usp;
}

Bundle default_egress_bundle(const std::string& org_id) {
  Ecp ecp;
  ecp.id = "egress";
  ecp.steps = {simple_step("insert-token", Document::object(), "sts"),
               simple_step("sign-elements", Document{{"paths", Document::array({"payload"})}})};
  Bundle bundle;
  bundle.ecps.emplace(ecp.id, ecp);
  bundle.irp = gateway::builtin_irp();
  bundle.usp = org_usp(org_id);
  bundle.ceps.push_back(gateway::derive_cep(ecp));
  return bundle;
}

Bundle default_ingress_bundle(const std::string& org_id) {
  Ecp ecp;
  ecp.id = "ingress";
  ecp.steps = {simple_step("validate-token", Document::object(), "sts"),
               simple_step("verify-elements", Document{{"paths", Document::array({"payload"})}}),
               simple_step("authorize", Document::object(), "pdp")};
  Bundle bundle;
  bundle.ecps.emplace(ecp.id, ecp);
  bundle.irp = gateway::builtin_irp();
  bundle.usp = org_usp(org_id);
  bundle.ceps.push_back(gateway::derive_cep(ecp));
  return bundle;
}

std::string path_str(const std::string& base, std::size_t index) {
  return base + "/" + std::to_string(index);
}

}  // namespace

std::unique_ptr<ScenarioRuntime> ScenarioRuntime::load_file(const std::string& path) {
  try {
    return load(core::read_document_file(path));
  } catch (const core::CanonicalizationError& e) {
    throw ScenarioError(std::string("cannot read scenario: ") + e.what());
  }
}

std::unique_ptr<ScenarioRuntime> ScenarioRuntime::load(const Document& scenario) {
  if (!scenario.is_object() || !scenario.contains("organizations"))
    throw ScenarioError("/: scenario needs an organizations array");

  auto runtime = std::unique_ptr<ScenarioRuntime>(new ScenarioRuntime());
  runtime->name_ = scenario.value("name", std::string("scenario"));
  runtime->clock_ = std::make_shared<core::FixedClock>(
      scenario.value("clock", std::int64_t{1'700'000'000}));
  runtime->events_ = std::make_shared<core::EventLog>(runtime->clock_);

  // principals: policy-signing keypairs derived from declared seeds
  core::KeyRegistry registry;
  if (scenario.contains("principals")) {
    for (auto it = scenario.at("principals").begin(); it != scenario.at("principals").end();
         ++it) {
      if (!it.value().contains("seed"))
        throw ScenarioError("/principals/" + it.key() + ": needs a seed");
      auto key = core::KeyPair::from_seed(
          std::string_view(it.value().at("seed").get<std::string>()));
      runtime->principals_.emplace(it.key(), key);
      registry.add(it.key(), key.public_key);
    }
  }

  const core::Bytes element_key = core::derive_seed(
      core::Bytes(runtime->name_.begin(), runtime->name_.end()), "element-key");

  // organizations
  const auto& orgs_doc = scenario.at("organizations");
  for (std::size_t i = 0; i < orgs_doc.size(); ++i) {
    const auto& org_doc = orgs_doc[i];
    const std::string org_path = path_str("/organizations", i);
    if (!org_doc.contains("id")) throw ScenarioError(org_path + ": organization needs an id");
    Organization org;
    org.id = org_doc.at("id").get<std::string>();
    if (runtime->orgs_.count(org.id))
      throw ScenarioError(org_path + ": duplicate organization id " + org.id);

    // broker; the loader injects its own management principal so it can wire
    // trust edges without the scenario having to declare one
    if (!org_doc.contains("broker"))
      throw ScenarioError(org_path + ": organization needs a broker");
    Document broker_doc = org_doc.at("broker");
    Document admins = broker_doc.contains("administrators") ? broker_doc.at("administrators")
                                                            : Document::array();
    admins.push_back("scenario-loader");
    broker_doc["administrators"] = admins;
    try {
      org.broker = sts::Broker::from_document(broker_doc, runtime->clock_, runtime->events_);
    } catch (const std::exception& e) {
      throw ScenarioError(org_path + "/broker: " + e.what());
    }
    if (runtime->broker_to_org_.count(org.broker->id()))
      throw ScenarioError(org_path + "/broker: duplicate broker id " + org.broker->id());
    runtime->broker_to_org_[org.broker->id()] = org.id;

    // identity cache for scripted requests and matrix probes
    if (broker_doc.contains("contexts"))
      for (const auto& ctx_doc : broker_doc.at("contexts")) {
        if (!ctx_doc.contains("selector") ||
            !ctx_doc.at("selector").contains("context-reference"))
          continue;
        const auto ref = ctx_doc.at("selector").at("context-reference").get<std::string>();
        if (ctx_doc.contains("providers") && ctx_doc.at("providers").contains("identities"))
          for (const auto& identity : ctx_doc.at("providers").at("identities"))
            runtime->identities_[org.id + "|" + ref]
                               [identity.at("subject").get<std::string>()] = identity;
      }

    // decision point
    std::set<std::string> trusted;
    if (org_doc.contains("pdp")) {
      const auto& pdp_doc = org_doc.at("pdp");
      if (pdp_doc.contains("trusted-authorities"))
        for (const auto& authority : pdp_doc.at("trusted-authorities")) {
          const auto id = authority.get<std::string>();
          if (!runtime->principals_.count(id))
            throw ScenarioError(org_path + "/pdp: trusted authority " + id +
                                " has no declared key");
          trusted.insert(id);
        }
      org.store = std::make_shared<pdp::PolicyStore>(registry, trusted, runtime->clock_);
      if (pdp_doc.contains("policies")) {
        const auto& policies = pdp_doc.at("policies");
        for (std::size_t p = 0; p < policies.size(); ++p) {
          const std::string policy_path = org_path + "/pdp/policies/" + std::to_string(p);
          if (!policies[p].contains("signer") || !policies[p].contains("body"))
            throw ScenarioError(policy_path + ": needs signer and body");
          const auto signer = policies[p].at("signer").get<std::string>();
          auto key = runtime->principals_.find(signer);
          if (key == runtime->principals_.end())
            throw ScenarioError(policy_path + ": signer " + signer + " not declared");
          try {
            org.store->load(core::SignedDocument::seal(policies[p].at("body"), signer,
                                                       key->second));
          } catch (const std::exception& e) {
            throw ScenarioError(policy_path + ": " + e.what());
          }
        }
      }
      if (pdp_doc.contains("providers"))
        for (const auto& provider : pdp_doc.at("providers"))
          org.providers.push_back(pdp::MapAttributeProvider::from_document(provider));
    } else {
      org.store = std::make_shared<pdp::PolicyStore>(registry, trusted, runtime->clock_);
    }

    if (org_doc.contains("services"))
      for (const auto& service : org_doc.at("services"))
        org.services.push_back(service.get<std::string>());

    // in-process service fabric
    runtime->directory_.register_service("svc://" + org.id + "/sts",
                                         gateway::make_sts_service(org.broker));
    runtime->directory_.register_service(
        "svc://" + org.id + "/pdp", gateway::make_pdp_service(org.store, org.providers));
    runtime->directory_.register_service("svc://" + org.id + "/keystore",
                                         gateway::make_keystore_service(element_key));
    {
      auto services = org.services;
      runtime->directory_.register_service(
          "svc://" + org.id + "/app", [services](const Document& request) -> Document {
            const auto resource = request.value("resource", std::string());
            if (std::find(services.begin(), services.end(), resource) == services.end())
              return Document{{"fault", "no service for resource " + resource}};
            // deterministic behavior: echo the request body and resource
            return Document{{"echo", request.value("body", Document::object())},
                            {"resource", resource}};
          });
    }

    // gateways
    Bundle egress = default_egress_bundle(org.id);
    Bundle ingress = default_ingress_bundle(org.id);
    if (org_doc.contains("gateway")) {
      try {
        if (org_doc.at("gateway").contains("egress"))
          egress = Bundle::from_document(org_doc.at("gateway").at("egress"));
        if (org_doc.at("gateway").contains("ingress"))
          ingress = Bundle::from_document(org_doc.at("gateway").at("ingress"));
      } catch (const std::exception& e) {
        throw ScenarioError(org_path + "/gateway: " + e.what());
      }
    }
    org.egress = std::make_unique<gateway::GatewayInstance>(
        org.id + "/egress", &runtime->directory_, runtime->events_, runtime->clock_);
    org.ingress = std::make_unique<gateway::GatewayInstance>(
        org.id + "/ingress", &runtime->directory_, runtime->events_, runtime->clock_);
    try {
      org.egress->lifecycle(gateway::LifecycleOp::Load, &egress);
      org.egress->lifecycle(gateway::LifecycleOp::Activate);
      org.ingress->lifecycle(gateway::LifecycleOp::Load, &ingress);
      org.ingress->lifecycle(gateway::LifecycleOp::Activate);
    } catch (const std::exception& e) {
      throw ScenarioError(org_path + "/gateway: " + e.what());
    }
    runtime->gateway_to_org_[org.id + "/egress"] = org.id;
    runtime->gateway_to_org_[org.id + "/ingress"] = org.id;

    runtime->orgs_.emplace(org.id, std::move(org));
  }

  // directed trust edges: validator accepts tokens issued by issuer
  if (scenario.contains("trust")) {
    const auto& edges = scenario.at("trust");
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const std::string edge_path = path_str("/trust", i);
      const auto& edge = edges[i];
      for (const char* field : {"context", "validator", "issuer"})
        if (!edge.contains(field))
          throw ScenarioError(edge_path + ": needs context, validator and issuer");
      const auto validator = edge.at("validator").get<std::string>();
      const auto issuer = edge.at("issuer").get<std::string>();
      auto validator_org = runtime->broker_to_org_.find(validator);
      if (validator_org == runtime->broker_to_org_.end())
        throw ScenarioError(edge_path + ": unknown validator broker " + validator);
      auto issuer_org = runtime->broker_to_org_.find(issuer);
      if (issuer_org == runtime->broker_to_org_.end())
        throw ScenarioError(edge_path + ": unknown issuer broker " + issuer);

      Document partner{{"broker", issuer},
                       {"key", core::to_base64(
                                   runtime->orgs_.at(issuer_org->second).broker->public_key())}};
      if (edge.contains("disclose")) partner["disclose"] = edge.at("disclose");
      try {
        runtime->orgs_.at(validator_org->second)
            .broker->manage("scenario-loader", "federation-partner", "add-partner",
                            Document{{"federation", edge.at("context").get<std::string>()},
                                     {"partner", partner}});
      } catch (const std::exception& e) {
        throw ScenarioError(edge_path + ": " + e.what());
      }
    }
  }

  // script validation: every reference must be declared
  if (scenario.contains("script")) {
    const auto& steps = scenario.at("script");
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const std::string step_path = path_str("/script", i);
      ScriptStep step;
      try {
        step = ScriptStep::from_document(steps[i]);
      } catch (const std::exception& e) {
        throw ScenarioError(step_path + ": " + e.what());
      }
      if (!runtime->orgs_.count(step.client_org))
        throw ScenarioError(step_path + ": unknown client organization " + step.client_org);
      if (!runtime->orgs_.count(step.target_org))
        throw ScenarioError(step_path + ": unknown target organization " + step.target_org);
      auto identities = runtime->identities_.find(step.client_org + "|" + step.context);
      if (identities == runtime->identities_.end() || !identities->second.count(step.subject))
        throw ScenarioError(step_path + ": subject " + step.subject + " not registered in " +
                            step.client_org + " context " + step.context);
      const auto& services = runtime->orgs_.at(step.target_org).services;
      if (std::find(services.begin(), services.end(), step.resource) == services.end())
        throw ScenarioError(step_path + ": resource " + step.resource + " not hosted by " +
                            step.target_org);
      runtime->script_.push_back(std::move(step));
    }
  }

  // adaptation rules
  std::vector<AdaptationRule> rules;
  if (scenario.contains("adaptation")) {
    const auto& rules_doc = scenario.at("adaptation");
    for (std::size_t i = 0; i < rules_doc.size(); ++i) {
      try {
        rules.push_back(AdaptationRule::from_document(rules_doc[i]));
      } catch (const std::exception& e) {
        throw ScenarioError(path_str("/adaptation", i) + ": " + e.what());
      }
    }
  }
  runtime->engine_ = std::make_unique<AdaptationEngine>(std::move(rules));
  runtime->event_cursor_ = runtime->events_->size();
  return runtime;
}

Organization& ScenarioRuntime::org(const std::string& id) {
  auto it = orgs_.find(id);
  if (it == orgs_.end()) throw ScenarioError("no organization " + id);
  return it->second;
}

Document ScenarioRuntime::credential_for(const std::string& org_id,
                                         const std::string& context_ref,
                                         const std::string& subject) const {
  auto identities = identities_.find(org_id + "|" + context_ref);
  if (identities == identities_.end())
    throw ScenarioError("no identities for " + org_id + " context " + context_ref);
  auto identity = identities->second.find(subject);
  if (identity == identities->second.end())
    throw ScenarioError("subject " + subject + " not registered in " + org_id + " context " +
                        context_ref);
  if (!identity->second.contains("secret"))
    throw ScenarioError("scripted requests need shared-secret identities; " + subject +
                        " has none");
  return Document{{"scheme", "shared-secret"},
                  {"secret", identity->second.at("secret").get<std::string>()}};
}

Document ScenarioRuntime::run_request(const ScriptStep& step) {
  std::string correlation;
  {
    std::lock_guard<std::mutex> lock(run_mutex_);
    correlation = "req-" + std::to_string(++correlation_counter_);
  }
  Document transcript = run_request_internal(step, correlation);
  pump_adaptation();
  return transcript;
}

Document ScenarioRuntime::run_request_internal(const ScriptStep& step,
                                               const std::string& correlation_id) {
  Organization& client = org(step.client_org);
  Organization& target = org(step.target_org);

  gateway::Message msg;
  msg.direction = gateway::Message::Direction::Outbound;
  msg.headers = {{"action", step.action},
                 {"context-reference", step.context},
                 {"correlation-id", correlation_id},
                 {"resource", step.resource},
                 {"subject", step.subject},
                 {"target-org", step.target_org}};
  msg.annotations["credential"] = credential_for(step.client_org, step.context, step.subject);
  msg.body = Document{{"payload", Document{{"action", step.action},
                                           {"resource", step.resource}}}};

  Document records = Document::array();
  auto finish = [&](const std::string& outcome) {
    return Document{{"outcome", outcome},
                    {"records", records},
                    {"request", step.to_document()}};
  };

  auto client_result = client.egress->process(std::move(msg));
  records.push_back(Document{{"result", client_result.to_document()},
                             {"stage", "client-gateway"}});
  if (!client_result.forwarded()) return finish("rejected-at-client");

  gateway::Message wire =
      gateway::Message::from_document(client_result.message.wire_document());
  wire.direction = gateway::Message::Direction::Inbound;
  auto target_result = target.ingress->process(std::move(wire));
  records.push_back(Document{{"result", target_result.to_document()},
                             {"stage", "target-gateway"}});
  if (!target_result.forwarded()) return finish("rejected-at-target");

  Document service_response;
  try {
    service_response = directory_.call(
        "svc://" + target.id + "/app",
        Document{{"body", target_result.message.body}, {"resource", step.resource}});
  } catch (const std::exception& e) {
    service_response = Document{{"fault", e.what()}};
  }
  records.push_back(Document{{"response", service_response}, {"stage", "service"}});
  if (service_response.contains("fault")) return finish("rejected-at-target");
  return finish("delivered");
}

std::vector<Document> ScenarioRuntime::run_script() {
  std::vector<Document> transcripts;
  for (const auto& step : script_) transcripts.push_back(run_request(step));
  return transcripts;
}

std::vector<Document> ScenarioRuntime::run_script_concurrent() {
  std::vector<std::future<Document>> futures;
  futures.reserve(script_.size());
  for (const auto& step : script_)
    futures.push_back(std::async(std::launch::async,
                                 [this, &step] { return run_request(step); }));
  std::vector<Document> transcripts;
  transcripts.reserve(futures.size());
  for (auto& f : futures) transcripts.push_back(f.get());
  return transcripts;
}

Document ScenarioRuntime::validity_matrix(const std::string& context) {
  // brokers participating in the context, in sorted id order
  std::vector<std::string> brokers;
  for (const auto& [broker_id, org_id] : broker_to_org_) {
    try {
      orgs_.at(org_id).broker->select_federation({{"context-reference", context}});
      brokers.push_back(broker_id);
    } catch (const sts::FederationNotFound&) {
    }
  }
  if (brokers.empty()) throw ScenarioError("no broker participates in context " + context);

  // fresh self-issued probe per issuer
  std::map<std::string, core::SignedDocument> probes;
  for (const auto& broker_id : brokers) {
    const auto& org_id = broker_to_org_.at(broker_id);
    auto identities = identities_.find(org_id + "|" + context);
    if (identities == identities_.end() || identities->second.empty())
      throw ScenarioError("no identity to probe " + broker_id + " in context " + context);
    const auto& subject = identities->second.begin()->first;
    sts::TokenRequest request;
    request.requester = subject;
    request.credential = credential_for(org_id, context, subject);
    request.metadata = {{"context-reference", context}};
    probes.emplace(broker_id, orgs_.at(org_id).broker->issue(request).envelope);
  }

  Document matrix = Document::object();
  for (const auto& validator : brokers) {
    Document row = Document::object();
    const auto& validator_org = broker_to_org_.at(validator);
    for (const auto& issuer : brokers)
      row[issuer] = orgs_.at(validator_org).broker->validate(probes.at(issuer), context).valid;
    matrix[validator] = row;
  }
  Document broker_list = Document::array();
  for (const auto& b : brokers) broker_list.push_back(b);
  return Document{{"brokers", broker_list}, {"context", context}, {"matrix", matrix}};
}

void ScenarioRuntime::pump_adaptation() {
  std::lock_guard<std::mutex> lock(run_mutex_);
  const auto snapshot = events_->events();
  const std::size_t end = snapshot.size();
  for (std::size_t i = event_cursor_; i < end; ++i) {
    const auto& event = snapshot[i];
    // §-style wiring: the gateway fires events at the adaptation engine
    auto origin_org = gateway_to_org_.find(event.origin);
    if (origin_org == gateway_to_org_.end()) continue;
    for (auto& action : engine_->step(event)) {
      if (action.kind == "block-requester") {
        auto subject = event.payload.find("subject");
        if (subject != event.payload.end())
          orgs_.at(origin_org->second).ingress->install_block_rule(subject->second);
      }
      // notify-issuer: the action record itself is the reconfiguration
      // request addressed to the issuing partner
      events_->record(core::EventType::AdaptationFired, "adaptation", action.context,
                      {{"action", action.kind},
                       {"issuer", action.payload.count("issuer") ? action.payload.at("issuer")
                                                                 : std::string()},
                       {"org", origin_org->second}});
      fired_.push_back(std::move(action));
    }
  }
  event_cursor_ = end;
}

}  // namespace fedsec::harness
