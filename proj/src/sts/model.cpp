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

#include "fedsec/sts/model.hpp"

#include "fedsec/core/errors.hpp"

namespace fedsec::sts {

using core::SchemaError;

Document Claim::to_document() const {
  return Document{{"authority", authority}, {"name", name},
                  {"value", core::value_to_loose(value)}};
}

Claim Claim::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("name") || !doc.contains("value"))
    throw SchemaError("claim needs name and value");
  Claim c;
  c.name = doc.at("name").get<std::string>();
  c.value = core::value_from_loose(doc.at("value"));
  if (doc.contains("authority")) c.authority = doc.at("authority").get<std::string>();
  return c;
}

Document ClaimsTransformationRule::to_document() const {
  Document doc{{"from", internal_id}, {"keep", keep}, {"to", external_name}};
  if (!value_map.empty()) {
    Document map = Document::object();
    for (const auto& [k, v] : value_map) map[k] = v;
    doc["map"] = map;
  }
  return doc;
}

ClaimsTransformationRule ClaimsTransformationRule::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("from") || !doc.contains("to"))
    throw SchemaError("transformation rule needs from and to");
  ClaimsTransformationRule rule;
  rule.internal_id = doc.at("from").get<std::string>();
  rule.external_name = doc.at("to").get<std::string>();
  if (doc.contains("keep")) rule.keep = doc.at("keep").get<bool>();
  if (doc.contains("map"))
    for (auto it = doc.at("map").begin(); it != doc.at("map").end(); ++it)
      rule.value_map[it.key()] = it.value().get<std::string>();
  return rule;
}

Document ClaimValidityRule::to_document() const {
  Document doc{{"claim", claim}, {"require", require}};
  if (!allowed.empty()) {
    Document arr = Document::array();
    for (const auto& v : allowed) arr.push_back(v);
    doc["allowed"] = arr;
  }
  return doc;
}

ClaimValidityRule ClaimValidityRule::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("claim"))
    throw SchemaError("claim validity rule needs a claim name");
  ClaimValidityRule rule;
  rule.claim = doc.at("claim").get<std::string>();
  if (doc.contains("require")) rule.require = doc.at("require").get<bool>();
  if (doc.contains("allowed"))
    for (const auto& v : doc.at("allowed")) rule.allowed.insert(v.get<std::string>());
  return rule;
}

Document PartnerDescriptor::to_document() const {
  Document doc{{"broker", broker_id}, {"key", core::to_base64(verification_key)}};
  if (!disclose.empty()) {
    Document arr = Document::array();
    for (const auto& c : disclose) arr.push_back(c);
    doc["disclose"] = arr;
  }
  return doc;
}

PartnerDescriptor PartnerDescriptor::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("broker") || !doc.contains("key"))
    throw SchemaError("partner descriptor needs broker and key");
  PartnerDescriptor p;
  p.broker_id = doc.at("broker").get<std::string>();
  p.verification_key = core::from_base64(doc.at("key").get<std::string>());
  if (doc.contains("disclose"))
    for (const auto& c : doc.at("disclose")) p.disclose.insert(c.get<std::string>());
  return p;
}

std::string to_string(AuthScheme s) {
  return s == AuthScheme::SharedSecret ? "shared-secret" : "signature-challenge";
}

AuthScheme auth_scheme_from_string(const std::string& s) {
  if (s == "shared-secret") return AuthScheme::SharedSecret;
  if (s == "signature-challenge") return AuthScheme::SignatureChallenge;
  throw SchemaError("unknown authentication scheme: " + s);
}

Document InternalIdentity::to_document() const {
  Document attrs = Document::object();
  for (const auto& [id, v] : attributes) attrs[id] = core::value_to_loose(v);
  Document doc{{"attributes", attrs}, {"subject", subject}};
  if (!secret.empty()) doc["secret"] = secret;
  if (!verification_key.empty()) doc["key"] = core::to_base64(verification_key);
  return doc;
}

InternalIdentity InternalIdentity::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("subject"))
    throw SchemaError("identity needs a subject");
  InternalIdentity id;
  id.subject = doc.at("subject").get<std::string>();
  if (doc.contains("secret")) id.secret = doc.at("secret").get<std::string>();
  if (doc.contains("key")) id.verification_key = core::from_base64(doc.at("key").get<std::string>());
  if (doc.contains("attributes"))
    for (auto it = doc.at("attributes").begin(); it != doc.at("attributes").end(); ++it)
      id.attributes[it.key()] = core::value_from_loose(it.value());
  return id;
}

bool FederationSelector::matches(const std::map<std::string, std::string>& metadata) const {
  for (const auto& [field, expected] : fields) {
    auto it = metadata.find(field);
    if (it == metadata.end() || it->second != expected) return false;
  }
  return true;
}

bool FederationSelector::overlaps(const FederationSelector& other) const {
  for (const auto& [field, expected] : fields) {
    auto it = other.fields.find(field);
    if (it != other.fields.end() && it->second != expected) return false;
  }
  return true;
}

Document FederationSelector::to_document() const {
  Document doc = Document::object();
  for (const auto& [k, v] : fields) doc[k] = v;
  return doc;
}

FederationSelector FederationSelector::from_document(const Document& doc) {
  if (!doc.is_object()) throw SchemaError("selector must be an object");
  FederationSelector s;
  for (auto it = doc.begin(); it != doc.end(); ++it)
    s.fields[it.key()] = it.value().get<std::string>();
  return s;
}

Document FederationContext::to_document() const {
  Document partners_doc = Document::array();
  for (const auto& [id, p] : partners) partners_doc.push_back(p.to_document());
  Document identities_doc = Document::array();
  for (const auto& [id, i] : identities) identities_doc.push_back(i.to_document());
  Document transform_doc = Document::array();
  for (const auto& r : transform_rules) transform_doc.push_back(r.to_document());
  Document validity_rules_doc = Document::array();
  for (const auto& r : validity_rules) validity_rules_doc.push_back(r.to_document());
  Document obligations_doc = Document::array();
  for (const auto& ob : obligations) obligations_doc.push_back(ob.to_document());

  Document providers{{"authentication", Document{{"scheme", to_string(auth_scheme)}}},
                     {"identities", identities_doc},
                     {"transform", transform_doc},
                     {"validity", Document{{"allow-empty", allow_empty_claims},
                                           {"lifetime", token_lifetime},
                                           {"rules", validity_rules_doc}}}};

  Document doc{{"enabled", enabled},
               {"federation", federation_id},
               {"obligations", obligations_doc},
               {"partners", partners_doc},
               {"providers", providers},
               {"selector", selector.to_document()}};
  if (!process.empty()) {
    Document arr = Document::array();
    for (const auto& stage : process) arr.push_back(stage);
    doc["process"] = arr;
  }
  return doc;
}

FederationContext FederationContext::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("federation") || !doc.contains("selector"))
    throw SchemaError("federation context needs federation and selector");
  FederationContext ctx;
  ctx.federation_id = doc.at("federation").get<std::string>();
  if (ctx.federation_id.empty()) throw SchemaError("federation id must be non-empty");
  ctx.selector = FederationSelector::from_document(doc.at("selector"));
  if (doc.contains("enabled")) ctx.enabled = doc.at("enabled").get<bool>();
  if (doc.contains("partners"))
    for (const auto& p : doc.at("partners")) {
      auto partner = PartnerDescriptor::from_document(p);
      ctx.partners.emplace(partner.broker_id, std::move(partner));
    }
  if (doc.contains("obligations"))
    for (const auto& ob : doc.at("obligations"))
      ctx.obligations.push_back(pdp::Obligation::from_document(ob));
  if (doc.contains("process"))
    for (const auto& stage : doc.at("process")) ctx.process.push_back(stage.get<std::string>());

  if (doc.contains("providers")) {
    const auto& prov = doc.at("providers");
    if (prov.contains("authentication"))
      ctx.auth_scheme =
          auth_scheme_from_string(prov.at("authentication").at("scheme").get<std::string>());
    if (prov.contains("identities"))
      for (const auto& i : prov.at("identities")) {
        auto identity = InternalIdentity::from_document(i);
        if (!ctx.identities.emplace(identity.subject, identity).second)
          throw SchemaError("subject registered twice in one context: " + identity.subject);
      }
    if (prov.contains("transform")) {
      std::set<std::string> seen;
      for (const auto& r : prov.at("transform")) {
        auto rule = ClaimsTransformationRule::from_document(r);
        if (!seen.insert(rule.internal_id).second)
          throw SchemaError("transformation rules must be functions; duplicate input " +
                            rule.internal_id);
        ctx.transform_rules.push_back(std::move(rule));
      }
    }
    if (prov.contains("validity")) {
      const auto& val = prov.at("validity");
      if (val.contains("lifetime")) ctx.token_lifetime = val.at("lifetime").get<std::int64_t>();
      if (val.contains("allow-empty")) ctx.allow_empty_claims = val.at("allow-empty").get<bool>();
      if (val.contains("rules"))
        for (const auto& r : val.at("rules"))
          ctx.validity_rules.push_back(ClaimValidityRule::from_document(r));
    }
  }
  return ctx;
}

Document SecurityToken::body_document() const {
  Document claims_doc = Document::array();
  for (const auto& c : claims) claims_doc.push_back(c.to_document());
  return Document{{"claims", claims_doc},
                  {"federation", federation_id},
                  {"issuer", issuer},
                  {"proof-key", core::to_base64(proof_key)},
                  {"subject", subject},
                  {"token-id", token_id},
                  {"validity", Document{{"not-after", not_after}, {"not-before", not_before}}}};
}

SecurityToken SecurityToken::parse_body(const Document& body) {
  if (!body.is_object()) throw SchemaError("token body must be an object");
  for (const char* field : {"token-id", "issuer", "subject", "federation", "validity", "proof-key"})
    if (!body.contains(field)) throw SchemaError(std::string("token body needs ") + field);
  SecurityToken t;
  t.token_id = body.at("token-id").get<std::string>();
  t.issuer = body.at("issuer").get<std::string>();
  t.subject = body.at("subject").get<std::string>();
  t.federation_id = body.at("federation").get<std::string>();
  t.proof_key = core::from_base64(body.at("proof-key").get<std::string>());
  t.not_before = body.at("validity").at("not-before").get<std::int64_t>();
  t.not_after = body.at("validity").at("not-after").get<std::int64_t>();
  if (t.not_before > t.not_after) throw SchemaError("token validity window is empty");
  if (body.contains("claims"))
    for (const auto& c : body.at("claims")) t.claims.push_back(Claim::from_document(c));
  return t;
}

}  // namespace fedsec::sts
