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

#include "fedsec/pdp/decision.hpp"

#include <algorithm>

#include "fedsec/core/errors.hpp"

namespace fedsec::pdp {

using core::Attribute;
using core::AttributeCategory;

std::string to_string(Decision d) {
  switch (d) {
    case Decision::Permit: return "Permit";
    case Decision::Deny: return "Deny";
    case Decision::NotApplicable: return "NotApplicable";
    case Decision::Indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

Decision decision_from_string(const std::string& s) {
  if (s == "Permit") return Decision::Permit;
  if (s == "Deny") return Decision::Deny;
  if (s == "NotApplicable") return Decision::NotApplicable;
  if (s == "Indeterminate") return Decision::Indeterminate;
  throw core::SchemaError("unknown decision: " + s);
}

DecisionRequest DecisionRequest::make(std::vector<Attribute> attributes, std::string context_id,
                                      std::vector<std::string> resource_ids) {
  DecisionRequest req;
  req.attributes = std::move(attributes);
  req.context_id = std::move(context_id);
  req.resource_ids = std::move(resource_ids);
  for (const auto& rid : req.resource_ids) {
    const bool present = std::any_of(
        req.attributes.begin(), req.attributes.end(), [&](const Attribute& a) {
          return a.id == "resource.id" && a.value == core::Value(rid);
        });
    if (!present)
      req.attributes.emplace_back(AttributeCategory::Resource, "resource.id", rid);
  }
  req.validate();
  return req;
}

void DecisionRequest::validate() const {
  if (resource_ids.empty()) throw RequestError("request needs at least one resource id");
  bool has_subject = false, has_action = false, has_resource = false;
  for (const auto& a : attributes) {
    switch (a.category) {
      case AttributeCategory::Subject: has_subject = true; break;
      case AttributeCategory::Action: has_action = true; break;
      case AttributeCategory::Resource: has_resource = true; break;
      case AttributeCategory::Environment: break;
      case AttributeCategory::Delegate:
        throw RequestError("delegate attributes are reserved for delegation validation");
    }
  }
  if (!has_subject) throw RequestError("request needs a subject attribute");
  if (!has_action) throw RequestError("request needs an action attribute");
  if (!has_resource) throw RequestError("request needs a resource attribute");
}

std::vector<core::Value> DecisionRequest::values_of(const std::string& attribute_id) const {
  std::vector<core::Value> out;
  for (const auto& a : attributes)
    if (a.id == attribute_id) out.push_back(a.value);
  return out;
}

Document DecisionRequest::to_document() const {
  Document attrs = Document::array();
  for (const auto& a : attributes) attrs.push_back(a.to_document());
  Document resources = Document::array();
  for (const auto& r : resource_ids) resources.push_back(r);
  return Document{{"attributes", attrs}, {"context-id", context_id}, {"resources", resources}};
}

DecisionRequest DecisionRequest::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("attributes") || !doc.contains("resources"))
    throw core::SchemaError("decision request needs attributes and resources");
  std::vector<Attribute> attrs;
  for (const auto& a : doc.at("attributes")) attrs.push_back(Attribute::from_document(a));
  std::vector<std::string> resources;
  for (const auto& r : doc.at("resources")) resources.push_back(r.get<std::string>());
  std::string ctx = doc.contains("context-id") ? doc.at("context-id").get<std::string>() : "";
  return make(std::move(attrs), std::move(ctx), std::move(resources));
}

Document TraceEntry::to_document() const {
  Document chain = Document::array();
  for (const auto& id : delegation_chain) chain.push_back(id);
  return Document{{"chain", chain},
                  {"decision", to_string(decision)},
                  {"policy", policy_id},
                  {"resource", resource_id}};
}

Document ResolutionNote::to_document() const {
  return Document{{"attribute", attribute_id},
                  {"failed", failed},
                  {"provider", provider},
                  {"values", static_cast<std::int64_t>(value_count)}};
}

Document DecisionResponse::to_document() const {
  Document results_doc = Document::array();
  for (const auto& r : results) {
    Document obligations = Document::array();
    for (const auto& ob : r.obligations) obligations.push_back(ob.to_document());
    results_doc.push_back(Document{{"decision", to_string(r.decision)},
                                   {"obligations", obligations},
                                   {"resource", r.resource_id}});
  }
  Document trace_doc = Document::array();
  for (const auto& t : trace) trace_doc.push_back(t.to_document());
  Document notes = Document::array();
  for (const auto& n : resolution) notes.push_back(n.to_document());
  return Document{{"resolution", notes}, {"results", results_doc}, {"trace", trace_doc}};
}

}  // namespace fedsec::pdp
