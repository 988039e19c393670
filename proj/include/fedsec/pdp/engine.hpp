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

#ifndef FEDSEC_PDP_ENGINE_HPP_
#define FEDSEC_PDP_ENGINE_HPP_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fedsec/pdp/decision.hpp"
#include "fedsec/pdp/model.hpp"
#include "fedsec/pdp/store.hpp"

namespace fedsec::pdp {

/// Source of attributes the request did not carry. Implementations may throw
/// or return an empty bag; both mean "nothing from this provider" and are
/// recorded in the resolution notes.
class AttributeProvider {
 public:
  virtual ~AttributeProvider() = default;
  virtual std::string name() const = 0;
  virtual std::vector<core::Value> resolve(const std::string& attribute_id,
                                           const DecisionRequest& request) = 0;
};

using AttributeProviderPtr = std::shared_ptr<AttributeProvider>;

/// In-memory provider: attribute id -> values. Stands in for directory-backed
/// attribute stores.
class MapAttributeProvider final : public AttributeProvider {
 public:
  MapAttributeProvider(std::string name, std::map<std::string, std::vector<core::Value>> values)
      : name_(std::move(name)), values_(std::move(values)) {}

  std::string name() const override { return name_; }
  std::vector<core::Value> resolve(const std::string& attribute_id,
                                   const DecisionRequest&) override {
    auto it = values_.find(attribute_id);
    return it == values_.end() ? std::vector<core::Value>{} : it->second;
  }

  /// File form: {"name": ..., "attributes": {"subject.role": [values...]}}
  static std::shared_ptr<MapAttributeProvider> from_document(const Document& doc);

 private:
  std::string name_;
  std::map<std::string, std::vector<core::Value>> values_;
};

/// Per-decision attribute view: request attributes take precedence, then
/// providers in registration order; the first provider returning values wins
/// and the result is cached for the rest of the decision.
class AttributeResolver {
 public:
  AttributeResolver(const DecisionRequest& request,
                    const std::vector<AttributeProviderPtr>& providers)
      : request_(request), providers_(providers) {}

  const std::vector<core::Value>& lookup(const std::string& attribute_id);
  const std::vector<ResolutionNote>& notes() const { return notes_; }

 private:
  const DecisionRequest& request_;
  const std::vector<AttributeProviderPtr>& providers_;
  std::map<std::string, std::vector<core::Value>> cache_;
  std::vector<ResolutionNote> notes_;
};

/// True iff every clause matches some attribute of the request; an empty
/// target matches everything. Missing attributes fail the clause, never
/// error.
bool match_target(const TargetMatcher& target, const DecisionRequest& request);

/// Syntactic subsumption: scope admits target iff for every scope clause
/// there is a target clause on the same attribute whose match set is
/// contained in the scope clause's. Undecidable combinations are treated as
/// not contained.
bool target_subsumes(const TargetMatcher& scope, const TargetMatcher& target);

struct PolicyEvaluation {
  Decision decision = Decision::NotApplicable;
  std::vector<Obligation> obligations;
};

/// Target mismatch is NotApplicable; otherwise rule decisions are combined
/// with the policy's combining algorithm. Unresolvable attributes in live
/// conditions surface as Indeterminate. Obligations come from rules whose
/// effect produced the final decision.
PolicyEvaluation evaluate_policy(const AuthzPolicy& policy, const DecisionRequest& request,
                                 AttributeResolver& resolver);

/// Combines (priority, decision) pairs. PriorityOverride scans in descending
/// priority (stable within equal priority), skipping NotApplicable;
/// FirstApplicable uses list order; the other two are order-insensitive.
/// Tables are documented in docs/combining-algorithms.md.
Decision combine(const std::vector<std::pair<std::int64_t, Decision>>& decisions,
                 CombiningAlg alg);

/// Splits a multi-resource request into one single-resource request per
/// distinct resource id (first occurrence order), sharing all non-resource.id
/// attributes.
std::vector<DecisionRequest> preprocess(const DecisionRequest& request);

/// The administrative request used to search for admitting administrative
/// policies: every attribute re-tagged with a "delegated." id prefix, plus
/// delegate.id naming the issuer under validation.
DecisionRequest administrative_request(const DecisionRequest& base,
                                       const std::string& delegate_id);

struct DelegationResult {
  bool authorized = false;
  std::vector<std::string> chain;  // anchor first, validated policy last
};

/// Searches administrative policies for a chain from the policy's issuer back
/// to a trusted anchor (an administrative policy whose issuer is a trusted
/// authority), honouring every constraint along the way. Cycles terminate via
/// a visited-issuer set; chain edges are capped by the smallest max-depth in
/// the chain. Unauthorized is a normal result.
DelegationResult validate_delegation(const AuthzPolicy& policy, const DecisionRequest& request,
                                     const PolicyStore& store);

struct EngineOptions {
  /// Pre-filter that drops store policies whose target cannot match any
  /// sub-request before per-resource processing. Semantics are identical on
  /// or off.
  bool partial_evaluation = false;
};

/// Binds a store snapshot to attribute providers. decide() is pure: identical
/// request + store snapshot + provider responses give an identical response.
class DecisionEngine {
 public:
  explicit DecisionEngine(const PolicyStore& store,
                          std::vector<AttributeProviderPtr> providers = {},
                          EngineOptions options = {});

  DecisionResponse decide(const DecisionRequest& request) const;

 private:
  const PolicyStore& store_;
  std::vector<AttributeProviderPtr> providers_;
  EngineOptions options_;
};

}  // namespace fedsec::pdp

#endif  // FEDSEC_PDP_ENGINE_HPP_
