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

#ifndef FEDSEC_PDP_DECISION_HPP_
#define FEDSEC_PDP_DECISION_HPP_

#include <stdexcept>
#include <string>
#include <vector>

#include "fedsec/core/attribute.hpp"
#include "fedsec/pdp/model.hpp"

namespace fedsec::pdp {

enum class Decision { Permit, Deny, NotApplicable, Indeterminate };

std::string to_string(Decision d);
Decision decision_from_string(const std::string& s);

/// The only error decide() throws; everything else is a decision.
struct RequestError : std::runtime_error {
  explicit RequestError(const std::string& what) : std::runtime_error(what) {}
};

/// An access request: a bag of attributes plus the resource ids it concerns.
/// make() injects a resource.id attribute per resource so every request
/// carries subject, action and resource attributes.
struct DecisionRequest {
  std::vector<core::Attribute> attributes;
  std::string context_id;
  std::vector<std::string> resource_ids;

  static DecisionRequest make(std::vector<core::Attribute> attributes, std::string context_id,
                              std::vector<std::string> resource_ids);

  /// Throws RequestError unless the request has >=1 subject, action and
  /// resource attribute, non-empty resource ids, and no caller-supplied
  /// delegate attributes.
  void validate() const;

  /// All values carried for an attribute id (bag semantics).
  std::vector<core::Value> values_of(const std::string& attribute_id) const;

  Document to_document() const;
  static DecisionRequest from_document(const Document& doc);
};

struct TraceEntry {
  std::string resource_id;
  std::string policy_id;
  Decision decision = Decision::NotApplicable;
  std::vector<std::string> delegation_chain;  // root anchor first; empty for root policies

  Document to_document() const;
};

/// Attribute-resolution notes: which provider was consulted and whether it
/// failed. Failures never throw; they surface as Indeterminate decisions.
struct ResolutionNote {
  std::string attribute_id;
  std::string provider;
  bool failed = false;
  std::size_t value_count = 0;

  Document to_document() const;
};

struct ResourceDecision {
  std::string resource_id;
  Decision decision = Decision::NotApplicable;
  std::vector<Obligation> obligations;
};

struct DecisionResponse {
  std::vector<ResourceDecision> results;
  std::vector<TraceEntry> trace;
  std::vector<ResolutionNote> resolution;

  Document to_document() const;
};

}  // namespace fedsec::pdp

#endif  // FEDSEC_PDP_DECISION_HPP_
