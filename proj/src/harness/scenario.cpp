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

#include "fedsec/harness/scenario.hpp"

namespace fedsec::harness {

Document ScriptStep::to_document() const {
  return Document{{"action", action},   {"client", client_org}, {"context", context},
                  {"resource", resource}, {"subject", subject},  {"target", target_org}};
}

ScriptStep ScriptStep::from_document(const Document& doc) {
  ScriptStep step;
  for (const char* field : {"client", "subject", "action", "resource", "target", "context"})
    if (!doc.contains(field))
      throw ScenarioError(std::string("script step needs field ") + field);
  step.client_org = doc.at("client").get<std::string>();
  step.subject = doc.at("subject").get<std::string>();
  step.action = doc.at("action").get<std::string>();
  step.resource = doc.at("resource").get<std::string>();
  step.target_org = doc.at("target").get<std::string>();
  step.context = doc.at("context").get<std::string>();
  return step;
}

Document AdaptationRule::to_document() const {
  Document scope = Document::array();
  for (const auto& key : scope_keys) scope.push_back(key);
  return Document{{"action", action},
                  {"on", core::to_string(trigger)},
                  {"scope", scope},
                  {"threshold", threshold}};
}

AdaptationRule AdaptationRule::from_document(const Document& doc) {
  AdaptationRule rule;
  if (doc.contains("on")) rule.trigger = core::event_type_from_string(doc.at("on").get<std::string>());
  if (doc.contains("threshold")) rule.threshold = doc.at("threshold").get<int>();
  if (rule.threshold < 1) throw ScenarioError("adaptation threshold must be >= 1");
  if (doc.contains("action")) rule.action = doc.at("action").get<std::string>();
  if (rule.action != "notify-issuer" && rule.action != "block-requester")
    throw ScenarioError("unknown adaptation action: " + rule.action);
  if (doc.contains("scope")) {
    rule.scope_keys.clear();
    for (const auto& key : doc.at("scope")) rule.scope_keys.push_back(key.get<std::string>());
  }
  return rule;
}

Document AdaptationAction::to_document() const {
  Document payload_doc = Document::object();
  for (const auto& [k, v] : payload) payload_doc[k] = v;
  return Document{{"action", kind},
                  {"context", context},
                  {"payload", payload_doc},
                  {"rule", static_cast<std::int64_t>(rule_index)},
                  {"scope", scope}};
}

std::vector<AdaptationAction> AdaptationEngine::step(const core::AuditEvent& event) {
  std::vector<AdaptationAction> fired;
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const AdaptationRule& rule = rules_[i];
    if (event.type != rule.trigger) continue;

    std::string scope = std::to_string(i) + "|" + event.context_id;
    for (const auto& key : rule.scope_keys) {
      auto it = event.payload.find(key);
      scope += "|" + (it == event.payload.end() ? std::string() : it->second);
    }

    int& counter = counters_[scope];
    if (++counter < rule.threshold) continue;
    counter = 0;  // reset on fire

    AdaptationAction action;
    action.kind = rule.action;
    action.scope = scope;
    action.context = event.context_id;
    action.rule_index = i;
    action.payload = event.payload;
    fired.push_back(std::move(action));
  }
  return fired;
}

}  // namespace fedsec::harness
