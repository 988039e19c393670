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

#include "fedsec/sts/broker.hpp"

#include <algorithm>
#include <cstdio>

#include "fedsec/core/errors.hpp"

namespace fedsec::sts {

namespace {

const std::vector<std::string> kDefaultProcess{"authenticate", "claims",     "transform",
                                               "disclose",     "proof-key",  "sign",
                                               "obligations",  "log"};

/// Declared pipelines must cover the mandatory stages and respect data
/// dependencies between them.
void check_process(const std::vector<std::string>& process) {
  if (process.empty()) return;  // default applies
  auto position = [&](const std::string& stage) -> int {
    auto it = std::find(process.begin(), process.end(), stage);
    return it == process.end() ? -1 : static_cast<int>(it - process.begin());
  };
  for (const auto& stage : process)
    if (std::find(kDefaultProcess.begin(), kDefaultProcess.end(), stage) ==
        kDefaultProcess.end())
      throw InvalidSpec("unknown pipeline stage: " + stage);
  for (const char* required : {"authenticate", "claims", "transform", "proof-key", "sign", "log"})
    if (position(required) < 0)
      throw InvalidSpec(std::string("pipeline must contain stage ") + required);
  auto before = [&](const std::string& a, const std::string& b) {
    if (position(a) >= position(b))
      throw InvalidSpec("pipeline stage " + a + " must precede " + b);
  };
  before("authenticate", "claims");
  before("claims", "transform");
  before("transform", "sign");
  before("proof-key", "sign");
  before("sign", "log");
}

std::string claim_display(const core::Value& v) { return core::value_to_display(v); }

}  // namespace

Document IssuanceRecord::to_document() const {
  Document doc{{"token", envelope}, {"wall", wall}};
  if (!source_token_id.empty()) doc["source"] = source_token_id;
  return doc;
}

Broker::Broker(std::string broker_id, std::string seed, std::set<std::string> administrators,
               core::ClockPtr clock, core::EventSinkPtr sink)
    : broker_id_(std::move(broker_id)), seed_text_(std::move(seed)),
      administrators_(std::move(administrators)), clock_(std::move(clock)),
      sink_(std::move(sink)) {
  key_ = core::KeyPair::from_seed(std::string_view(seed_text_ + ":sign"));
  proof_seed_key_ =
      core::derive_seed(core::Bytes(seed_text_.begin(), seed_text_.end()), "proof-keys");
  if (!sink_) sink_ = std::make_shared<core::NullSink>();
}

std::shared_ptr<Broker> Broker::from_document(const Document& doc, core::ClockPtr clock,
                                              core::EventSinkPtr sink) {
  if (!doc.is_object() || !doc.contains("broker") || !doc.contains("seed"))
    throw core::SchemaError("broker config needs broker and seed");
  std::set<std::string> admins;
  if (doc.contains("administrators"))
    for (const auto& a : doc.at("administrators")) admins.insert(a.get<std::string>());
  auto broker = std::make_shared<Broker>(doc.at("broker").get<std::string>(),
                                         doc.at("seed").get<std::string>(), std::move(admins),
                                         std::move(clock), std::move(sink));
  if (doc.contains("contexts"))
    for (const auto& c : doc.at("contexts")) {
      auto ctx = FederationContext::from_document(c);
      check_process(ctx.process);
      broker->check_selector_disjoint(ctx);
      broker->contexts_.emplace(ctx.federation_id, std::move(ctx));
    }
  return broker;
}

Document Broker::to_document() const {
  std::lock_guard<std::mutex> lock(mutex_);
  Document admins = Document::array();
  for (const auto& a : administrators_) admins.push_back(a);
  Document contexts = Document::array();
  for (const auto& [id, ctx] : contexts_) contexts.push_back(ctx.to_document());
  return Document{{"administrators", admins},
                  {"broker", broker_id_},
                  {"contexts", contexts},
                  {"seed", seed_text_}};
}

void Broker::check_selector_disjoint(const FederationContext& candidate) const {
  for (const auto& [id, ctx] : contexts_) {
    if (id == candidate.federation_id) continue;
    if (ctx.selector.overlaps(candidate.selector))
      throw InvalidSpec("selector of " + candidate.federation_id + " overlaps with " + id);
  }
}

FederationContext* Broker::context_by_id(const std::string& federation_id) {
  auto it = contexts_.find(federation_id);
  return it == contexts_.end() ? nullptr : &it->second;
}

const FederationContext* Broker::context_by_id(const std::string& federation_id) const {
  auto it = contexts_.find(federation_id);
  return it == contexts_.end() ? nullptr : &it->second;
}

FederationContext Broker::select_federation(
    const std::map<std::string, std::string>& metadata) const {
  std::lock_guard<std::mutex> lock(mutex_);
  const FederationContext* found = nullptr;
  for (const auto& [id, ctx] : contexts_) {
    if (!ctx.enabled) continue;  // disabled contexts match nothing
    if (!ctx.selector.matches(metadata)) continue;
    if (found) throw AmbiguousSelector("selectors overlap between " + found->federation_id +
                                       " and " + id);
    found = &ctx;
  }
  if (!found) throw FederationNotFound("no federation context matches the request");
  return *found;  // per-request snapshot
}

InternalIdentity Broker::authenticate(const std::string& subject, const Document& credential,
                                      const FederationContext& context) const {
  auto it = context.identities.find(subject);
  if (it == context.identities.end())
    throw UnknownSubject("no internal identity for " + subject + " in " + context.federation_id);
  const InternalIdentity& identity = it->second;

  if (!credential.is_object() || !credential.contains("scheme"))
    throw AuthenticationFailed("credential carries no scheme");
  const auto scheme = credential.at("scheme").get<std::string>();
  if (scheme != to_string(context.auth_scheme))
    throw AuthenticationFailed("scheme-mismatch: context expects " +
                               to_string(context.auth_scheme));

  switch (context.auth_scheme) {
    case AuthScheme::SharedSecret: {
      if (!credential.contains("secret") ||
          credential.at("secret").get<std::string>() != identity.secret)
        throw AuthenticationFailed("shared secret does not match for " + subject);
      break;
    }
    case AuthScheme::SignatureChallenge: {
      if (!credential.contains("signature"))
        throw AuthenticationFailed("signature credential missing signature");
      const std::string challenge = core::canonicalize(Document{
          {"broker", broker_id_}, {"federation", context.federation_id}, {"subject", subject}});
      auto sig = core::from_base64(credential.at("signature").get<std::string>());
      if (!core::verify_bytes(challenge, sig, identity.verification_key))
        throw AuthenticationFailed("challenge signature does not verify for " + subject);
      break;
    }
  }
  return identity;
}

IssueResult Broker::issue_in_context(const FederationContext& context, const std::string& subject,
                                     const std::map<std::string, core::Value>& internal_attributes,
                                     const std::set<std::string>& claims_hint,
                                     const std::string& target_partner,
                                     const std::string& source_token_id) {
  // transform
  std::vector<Claim> claims;
  for (const auto& rule : context.transform_rules) {
    if (!rule.keep) continue;
    auto it = internal_attributes.find(rule.internal_id);
    if (it == internal_attributes.end()) continue;
    core::Value value = it->second;
    if (!rule.value_map.empty()) {
      auto mapped = rule.value_map.find(claim_display(value));
      if (mapped == rule.value_map.end()) continue;  // unmapped values stay private
      value = mapped->second;
    }
    claims.push_back(Claim{rule.external_name, std::move(value), broker_id_});
  }

  // disclose
  if (!claims_hint.empty()) {
    std::erase_if(claims, [&](const Claim& c) { return !claims_hint.count(c.name); });
  }
  if (!target_partner.empty()) {
    auto partner = context.partners.find(target_partner);
    if (partner != context.partners.end() && !partner->second.disclose.empty())
      std::erase_if(claims,
                    [&](const Claim& c) { return !partner->second.disclose.count(c.name); });
  }
  if (claims.empty() && !context.allow_empty_claims)
    throw NoClaimsAvailable("no claims left for " + subject + " in " + context.federation_id);

  // proof key: fresh per token, derived so fixed seeds reproduce transcripts
  const std::int64_t serial = ++issue_counter_;
  char suffix[32];
  std::snprintf(suffix, sizeof(suffix), "-t%06lld", static_cast<long long>(serial));
  auto proof =
      core::KeyPair::from_seed(core::derive_seed(proof_seed_key_, broker_id_ + suffix));

  // sign
  SecurityToken token;
  token.token_id = broker_id_ + suffix;
  token.issuer = broker_id_;
  token.subject = subject;
  token.claims = std::move(claims);
  token.federation_id = context.federation_id;
  token.not_before = clock_->now_unix();
  token.not_after = token.not_before + context.token_lifetime;
  token.proof_key = proof.public_key;
  auto envelope = core::SignedDocument::seal(token.body_document(), broker_id_, key_);

  // obligations + log
  IssueResult result{std::move(token), std::move(envelope), proof.secret_key,
                     context.obligations};
  issuance_log_.push_back(
      {clock_->now_unix(), result.envelope.to_document(), source_token_id});
  sink_->record(core::EventType::TokenIssued, broker_id_, context.federation_id,
                {{"subject", subject},
                 {"token", result.token.token_id},
                 {"source", source_token_id}});
  return result;
}

IssueResult Broker::issue(const TokenRequest& request) {
  std::lock_guard<std::mutex> lock(mutex_);
  const FederationContext* selected = nullptr;
  for (const auto& [id, ctx] : contexts_) {
    if (!ctx.enabled || !ctx.selector.matches(request.metadata)) continue;
    if (selected)
      throw AmbiguousSelector("selectors overlap between " + selected->federation_id + " and " +
                              id);
    selected = &ctx;
  }
  if (!selected) throw FederationNotFound("no federation context matches the request");
  const FederationContext context = *selected;  // pipeline instance snapshot

  std::string target_partner;
  if (auto it = request.metadata.find("target-partner"); it != request.metadata.end())
    target_partner = it->second;

  // The business-logic process: stages up to claims fetching run here, the
  // transform/disclose/proof/sign/obligations/log tail is shared with
  // exchange. The declared order has been validated at configuration time.
  const auto& process = context.process.empty() ? kDefaultProcess : context.process;
  std::optional<InternalIdentity> identity;
  std::map<std::string, core::Value> attributes;
  for (const auto& stage : process) {
    if (stage == "authenticate") {
      try {
        identity = authenticate(request.requester, request.credential, context);
      } catch (const std::exception& e) {
        sink_->record(core::EventType::TokenRejected, broker_id_, context.federation_id,
                      {{"reason", "authentication-failed"},
                       {"subject", request.requester},
                       {"detail", e.what()}});
        throw;
      }
    } else if (stage == "claims") {
      if (!identity) throw InvalidSpec("pipeline fetched claims before authentication");
      attributes = identity->attributes;
    } else if (stage == "transform") {
      break;  // tail handled below in one piece
    }
  }
  if (!identity) throw InvalidSpec("pipeline never authenticated the requester");
  return issue_in_context(context, identity->subject, attributes, request.claims_hint,
                          target_partner, "");
}

ValidationResult Broker::validate_in_context(const FederationContext& context,
                                             const core::SignedDocument& envelope,
                                             const std::string& audit_context) const {
  ValidationResult result;
  result.federation_id = context.federation_id;

  SecurityToken token;
  try {
    token = SecurityToken::parse_body(envelope.body);
  } catch (const std::exception&) {
    result.reason = "malformed";
    sink_->record(core::EventType::TokenRejected, broker_id_, audit_context,
                  {{"reason", result.reason}});
    return result;
  }
  result.issuer = token.issuer;
  result.subject = token.subject;

  auto reject = [&](const std::string& reason) {
    result.reason = reason;
    sink_->record(core::EventType::TokenRejected, broker_id_, audit_context,
                  {{"issuer", token.issuer},
                   {"reason", reason},
                   {"subject", token.subject},
                   {"token", token.token_id}});
    return result;
  };

  // 1. issuer must be this broker or a trusted partner (directed edge)
  const core::Bytes* issuer_key = nullptr;
  if (token.issuer == broker_id_) {
    issuer_key = &key_.public_key;
  } else {
    auto partner = context.partners.find(token.issuer);
    if (partner == context.partners.end()) return reject("untrusted-issuer");
    issuer_key = &partner->second.verification_key;
  }

  // 2. signature
  if (envelope.signer != token.issuer || !envelope.verify_with(*issuer_key))
    return reject("bad-signature");

  // 3. validity window
  const std::int64_t now = clock_->now_unix();
  if (now < token.not_before) return reject("not-yet-valid");
  if (now > token.not_after) return reject("expired");

  // 4. claims validity rules; failures here feed the adaptation loop
  for (const auto& rule : context.validity_rules) {
    std::vector<const Claim*> named;
    for (const auto& c : token.claims)
      if (c.name == rule.claim) named.push_back(&c);
    std::string failure;
    if (rule.require && named.empty()) failure = "missing required claim " + rule.claim;
    if (failure.empty() && !rule.allowed.empty())
      for (const auto* c : named)
        if (!rule.allowed.count(claim_display(c->value))) {
          failure = "claim " + rule.claim + " carries a disallowed value";
          break;
        }
    if (!failure.empty()) {
      result.reason = "invalid-claims";
      sink_->record(core::EventType::InvalidClaims, broker_id_, audit_context,
                    {{"detail", failure},
                     {"issuer", token.issuer},
                     {"subject", token.subject},
                     {"token", token.token_id}});
      return result;
    }
  }

  // 5. optional authorization-service integration
  if (service_access_hook_ && !service_access_hook_(token)) return reject("service-access-denied");

  result.valid = true;
  result.claims = token.claims;
  result.proof_key = token.proof_key;
  sink_->record(core::EventType::TokenValidated, broker_id_, audit_context,
                {{"issuer", token.issuer},
                 {"subject", token.subject},
                 {"token", token.token_id}});
  return result;
}

ValidationResult Broker::validate(const core::SignedDocument& token_envelope,
                                  const std::string& context_reference) const {
  FederationContext context;
  try {
    context = select_federation({{"context-reference", context_reference}});
  } catch (const FederationNotFound&) {
    ValidationResult result;
    result.reason = "unknown-context";
    sink_->record(core::EventType::TokenRejected, broker_id_, context_reference,
                  {{"reason", result.reason}});
    return result;
  }
  std::lock_guard<std::mutex> lock(mutex_);
  return validate_in_context(context, token_envelope, context.federation_id);
}

ValidationResult Broker::validate_bytes(std::string_view canonical_or_armored,
                                        const std::string& context_reference) const {
  try {
    std::string bytes(canonical_or_armored);
    if (!bytes.empty() && bytes[0] != '{') {
      auto decoded = core::from_base64(bytes);
      bytes.assign(decoded.begin(), decoded.end());
    }
    auto envelope = core::SignedDocument::from_document(core::parse_document(bytes));
    return validate(envelope, context_reference);
  } catch (const std::exception&) {
    ValidationResult result;
    result.reason = "malformed";
    sink_->record(core::EventType::TokenRejected, broker_id_, context_reference,
                  {{"reason", result.reason}});
    return result;
  }
}

IssueResult Broker::exchange(const core::SignedDocument& token_envelope,
                             const std::string& target_context_reference) {
  // validate in the source context first; nothing is issued on failure
  SecurityToken source_token;
  try {
    source_token = SecurityToken::parse_body(token_envelope.body);
  } catch (const std::exception&) {
    throw SourceInvalid("source token is malformed");
  }

  std::lock_guard<std::mutex> lock(mutex_);
  const FederationContext* source = context_by_id(source_token.federation_id);
  if (!source || !source->enabled)
    throw SourceInvalid("source context " + source_token.federation_id + " not available");
  auto source_result = validate_in_context(*source, token_envelope, source->federation_id);
  if (!source_result.valid)
    throw SourceInvalid("source token failed validation: " + source_result.reason);

  const FederationContext* target = nullptr;
  for (const auto& [id, ctx] : contexts_) {
    if (!ctx.enabled) continue;
    if (ctx.selector.matches({{"context-reference", target_context_reference}})) {
      target = &ctx;
      break;
    }
  }
  if (!target)
    throw FederationNotFound("no target context for reference " + target_context_reference);

  // external claims of the source token feed the target's transformation
  std::map<std::string, core::Value> attributes;
  for (const auto& c : source_result.claims) attributes[c.name] = c.value;
  return issue_in_context(*target, source_token.subject, attributes, {}, "",
                          source_token.token_id);
}

std::vector<std::string> Broker::context_ids() const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, ctx] : contexts_) out.push_back(id);
  return out;
}

Document Broker::manage(const std::string& principal, const std::string& target,
                        const std::string& operation, const Document& args) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!administrators_.count(principal))
    throw ManagementForbidden(principal + " may not manage broker " + broker_id_);
  Document result =
      target == "core" ? manage_core(operation, args) : manage_provider(target, operation, args);
  return result;
}

Document Broker::manage_core(const std::string& operation, const Document& args) {
  if (operation == "create-federation") {
    auto ctx = FederationContext::from_document(args);
    if (contexts_.count(ctx.federation_id))
      throw InvalidSpec("federation already exists: " + ctx.federation_id);
    check_process(ctx.process);
    check_selector_disjoint(ctx);
    const std::string id = ctx.federation_id;
    contexts_.emplace(id, std::move(ctx));
    sink_->record(core::EventType::ConfigChanged, broker_id_, id,
                  {{"operation", "create-federation"}});
    return Document{{"federation", id}};
  }
  if (operation == "enable" || operation == "disable") {
    const auto id = args.at("federation").get<std::string>();
    auto* ctx = context_by_id(id);
    if (!ctx) throw FederationNotFound("no federation " + id);
    ctx->enabled = operation == "enable";
    sink_->record(core::EventType::ConfigChanged, broker_id_, id, {{"operation", operation}});
    return Document{{"enabled", ctx->enabled}, {"federation", id}};
  }
  if (operation == "inspect") {
    if (args.is_object() && args.contains("federation")) {
      const auto id = args.at("federation").get<std::string>();
      auto* ctx = context_by_id(id);
      if (!ctx) throw FederationNotFound("no federation " + id);
      return ctx->to_document();
    }
    Document all = Document::array();
    for (const auto& [id, ctx] : contexts_) all.push_back(ctx.to_document());
    return Document{{"contexts", all}};
  }
  throw InvalidSpec("unknown core management operation: " + operation);
}

Document Broker::manage_provider(const std::string& provider, const std::string& operation,
                                 const Document& args) {
  static const std::set<std::string> kProviders{"federation-partner", "claims",
                                                "claims-transformation", "claims-validity",
                                                "authentication", "obligation"};
  if (!kProviders.count(provider)) throw UnknownProvider("no provider module " + provider);

  const auto fid = args.at("federation").get<std::string>();
  auto* ctx = context_by_id(fid);
  if (!ctx) throw FederationNotFound("no federation " + fid);

  auto changed = [&] {
    sink_->record(core::EventType::ConfigChanged, broker_id_, fid,
                  {{"operation", operation}, {"provider", provider}});
  };

  if (provider == "federation-partner") {
    if (operation == "add-partner") {
      auto partner = PartnerDescriptor::from_document(args.at("partner"));
      ctx->partners[partner.broker_id] = std::move(partner);
      changed();
      return Document{{"partners", static_cast<std::int64_t>(ctx->partners.size())}};
    }
    if (operation == "remove-partner") {
      ctx->partners.erase(args.at("broker").get<std::string>());
      changed();
      return Document{{"partners", static_cast<std::int64_t>(ctx->partners.size())}};
    }
    if (operation == "list") {
      Document arr = Document::array();
      for (const auto& [id, p] : ctx->partners) arr.push_back(p.to_document());
      return arr;
    }
  } else if (provider == "claims") {
    if (operation == "register-identity") {
      auto identity = InternalIdentity::from_document(args.at("identity"));
      if (ctx->identities.count(identity.subject))
        throw InvalidSpec("subject already registered: " + identity.subject);
      ctx->identities.emplace(identity.subject, std::move(identity));
      changed();
      return Document{{"identities", static_cast<std::int64_t>(ctx->identities.size())}};
    }
    if (operation == "remove-identity") {
      ctx->identities.erase(args.at("subject").get<std::string>());
      changed();
      return Document{{"identities", static_cast<std::int64_t>(ctx->identities.size())}};
    }
    if (operation == "list") {
      Document arr = Document::array();
      for (const auto& [id, i] : ctx->identities) arr.push_back(i.to_document());
      return arr;
    }
  } else if (provider == "claims-transformation") {
    if (operation == "add-rule") {
      auto rule = ClaimsTransformationRule::from_document(args.at("rule"));
      for (const auto& existing : ctx->transform_rules)
        if (existing.internal_id == rule.internal_id)
          throw InvalidSpec("transformation rules must be functions; duplicate input " +
                            rule.internal_id);
      ctx->transform_rules.push_back(std::move(rule));
      changed();
      return Document{{"rules", static_cast<std::int64_t>(ctx->transform_rules.size())}};
    }
    if (operation == "remove-rule") {
      const auto from = args.at("from").get<std::string>();
      std::erase_if(ctx->transform_rules,
                    [&](const ClaimsTransformationRule& r) { return r.internal_id == from; });
      changed();
      return Document{{"rules", static_cast<std::int64_t>(ctx->transform_rules.size())}};
    }
    if (operation == "list") {
      Document arr = Document::array();
      for (const auto& r : ctx->transform_rules) arr.push_back(r.to_document());
      return arr;
    }
  } else if (provider == "claims-validity") {
    if (operation == "add-rule") {
      ctx->validity_rules.push_back(ClaimValidityRule::from_document(args.at("rule")));
      changed();
      return Document{{"rules", static_cast<std::int64_t>(ctx->validity_rules.size())}};
    }
    if (operation == "remove-rule") {
      const auto claim = args.at("claim").get<std::string>();
      std::erase_if(ctx->validity_rules,
                    [&](const ClaimValidityRule& r) { return r.claim == claim; });
      changed();
      return Document{{"rules", static_cast<std::int64_t>(ctx->validity_rules.size())}};
    }
    if (operation == "list") {
      Document arr = Document::array();
      for (const auto& r : ctx->validity_rules) arr.push_back(r.to_document());
      return arr;
    }
  } else if (provider == "authentication") {
    if (operation == "set-scheme") {
      ctx->auth_scheme = auth_scheme_from_string(args.at("scheme").get<std::string>());
      changed();
      return Document{{"scheme", to_string(ctx->auth_scheme)}};
    }
  } else if (provider == "obligation") {
    if (operation == "add") {
      ctx->obligations.push_back(pdp::Obligation::from_document(args.at("obligation")));
      changed();
      return Document{{"obligations", static_cast<std::int64_t>(ctx->obligations.size())}};
    }
    if (operation == "clear") {
      ctx->obligations.clear();
      changed();
      return Document{{"obligations", 0}};
    }
  }
  throw InvalidSpec("provider " + provider + " does not support operation " + operation);
}

}  // namespace fedsec::sts
