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

#ifndef FEDSEC_HARNESS_SCENARIO_HPP_
#define FEDSEC_HARNESS_SCENARIO_HPP_

#include <string>
#include <vector>

#include "fedsec/core/audit.hpp"
#include "fedsec/core/document.hpp"

namespace fedsec::harness {

using core::Document;

/// Any dangling reference or malformed section in a scenario file. The
/// message names the offending document path.
struct ScenarioError : std::runtime_error {
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

struct ScriptStep {
  std::string client_org;
  std::string subject;
  std::string action;
  std::string resource;
  std::string target_org;
  std::string context;

  Document to_document() const;
  static ScriptStep from_document(const Document& doc);
};

/// Threshold rule: after `threshold` matching in-scope events, fire the
/// action and reset the counter. Scope is the event context plus the named
/// payload fields (issuer partner by default).
struct AdaptationRule {
  core::EventType trigger = core::EventType::InvalidClaims;
  int threshold = 1;
  std::vector<std::string> scope_keys{"issuer"};
  std::string action = "notify-issuer";  // or block-requester

  Document to_document() const;
  static AdaptationRule from_document(const Document& doc);
};

struct AdaptationAction {
  std::string kind;
  std::string scope;
  std::string context;
  std::size_t rule_index = 0;
  std::map<std::string, std::string> payload;  // from the triggering event

  Document to_document() const;
};

/// Deterministic counter engine: same event stream, same action sequence.
class AdaptationEngine {
 public:
  explicit AdaptationEngine(std::vector<AdaptationRule> rules) : rules_(std::move(rules)) {}

  /// Feeds one event; returns the actions fired by it (usually none or one).
  std::vector<AdaptationAction> step(const core::AuditEvent& event);

  const std::vector<AdaptationRule>& rules() const { return rules_; }

 private:
  std::vector<AdaptationRule> rules_;
  std::map<std::string, int> counters_;
};

}  // namespace fedsec::harness

#endif  // FEDSEC_HARNESS_SCENARIO_HPP_
