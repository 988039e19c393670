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

#include "fedsec/gateway/interceptors.hpp"

#include "fedsec/core/attribute.hpp"
#include "fedsec/pdp/decision.hpp"

namespace fedsec::gateway {

namespace {

std::string param_or_header(const Step& step, const ProcessingContext& ctx,
                            const std::string& name) {
  if (step.params.contains(name)) return step.params.at(name).get<std::string>();
  return ctx.message.header(name);
}

std::vector<std::string> path_list(const Step& step) {
  std::vector<std::string> paths;
  if (!step.params.contains("paths"))
    throw StepFailure("bad-params", "element step without paths");
  for (const auto& p : step.params.at("paths")) paths.push_back(p.get<std::string>());
  return paths;
}

core::Bytes fetch_key(const Step& step, ProcessingContext& ctx) {
  auto response = ctx.utility.call(step.usp_ref, Document{{"op", "get-key"}});
  if (response.contains("fault"))
    throw StepFailure("keystore", response.at("fault").get<std::string>());
  return core::from_base64(response.at("key").get<std::string>());
}

/// Obligations a gateway knows how to enforce. Anything else is rejected:
/// an unenforceable obligation must never be silently dropped.
void enforce_obligation(const Document& obligation, ProcessingContext& ctx) {
  const auto id = obligation.at("id").get<std::string>();
  Document params = obligation.contains("params") ? obligation.at("params") : Document::object();
  if (id == "emit-audit") {
    std::map<std::string, std::string> payload{{"obligation", "emit-audit"}};
    for (auto it = params.begin(); it != params.end(); ++it)
      payload[it.key()] = it.value().get<std::string>();
    ctx.sink.record(core::EventType::MessageProcessed, ctx.origin,
                    ctx.message.header("context-reference"), std::move(payload));
    return;
  }
  if (id == "annotate") {
    for (auto it = params.begin(); it != params.end(); ++it)
      ctx.message.annotations[it.key()] = it.value();
    return;
  }
  if (id == "require-assertion") {
    std::string ref;
    if (obligation.contains("assertion-ref")) ref = obligation.at("assertion-ref").get<std::string>();
    else if (params.contains("assertion-ref")) ref = params.at("assertion-ref").get<std::string>();
    for (const auto& cep : ctx.ceps)
      for (const auto& assertion : cep.assertions)
        if (assertion.id == ref) {
          ctx.message.annotations["enforced-assertion"] = ref;
          return;
        }
    throw StepFailure("unknown-assertion", "obligation references assertion " + ref);
  }
  throw StepFailure("unknown-obligation", "no handler for obligation " + id);
}

class ValidateStructure final : public Interceptor {
 public:
  void execute(const Step& step, ProcessingContext& ctx) override {
    if (!step.params.contains("schema"))
      throw StepFailure("bad-params", "validate-structure without schema");
    const auto& schema = step.params.at("schema");
    if (schema.contains("require"))
      for (const auto& p : schema.at("require")) {
        const auto path = p.get<std::string>();
        if (!element_at(ctx.message.body, path))
          throw StepFailure("structure", "required element missing: " + path);
      }
    if (schema.contains("types"))
      for (auto it = schema.at("types").begin(); it != schema.at("types").end(); ++it) {
        const Document* el = element_at(ctx.message.body, it.key());
        if (!el) throw StepFailure("structure", "required element missing: " + it.key());
        const auto expected = it.value().get<std::string>();
        const bool ok = (expected == "string" && el->is_string()) ||
                        (expected == "integer" && el->is_number_integer()) ||
                        (expected == "boolean" && el->is_boolean()) ||
                        (expected == "object" && el->is_object());
        if (!ok)
          throw StepFailure("structure", "element " + it.key() + " is not a " + expected);
      }
  }
};

class InsertToken final : public Interceptor {
 public:
  void execute(const Step& step, ProcessingContext& ctx) override {
    Message& msg = ctx.message;
    const std::string subject = msg.header("subject");
    if (subject.empty()) throw StepFailure("no-subject", "message carries no subject header");

    Document credential;
    if (msg.annotations.contains("credential") && msg.annotations.at("credential").is_object())
      credential = msg.annotations.at("credential");
    else if (msg.has_header("credential"))
      credential = Document{{"scheme", "shared-secret"}, {"secret", msg.header("credential")}};
    else
      throw StepFailure("no-credential", "nothing to authenticate " + subject + " with");

    const std::string context_ref = param_or_header(step, ctx, "context-reference");
    Document metadata{{"context-reference", context_ref}};
    if (msg.has_header("target-partner")) metadata["target-partner"] = msg.header("target-partner");

    auto response = ctx.utility.call(
        step.usp_ref, Document{{"op", "issue"},
                               {"requester", subject},
                               {"credential", credential},
                               {"metadata", metadata}});
    if (response.contains("fault"))
      throw StepFailure("token-issue", response.at("fault").get<std::string>());

    msg.headers["token"] = response.at("armored").get<std::string>();
    msg.annotations["proof-key-private"] = response.at("proof-key-private");
    msg.annotations["token-id"] = response.at("token-id");
    // the credential has served its purpose; it must not travel further
    msg.headers.erase("credential");
    msg.annotations.erase("credential");

    if (response.contains("obligations"))
      for (const auto& ob : response.at("obligations")) enforce_obligation(ob, ctx);
  }
};

class ValidateToken final : public Interceptor {
 public:
  void execute(const Step& step, ProcessingContext& ctx) override {
    Message& msg = ctx.message;
    if (!msg.has_header("token")) throw StepFailure("no-token", "message carries no token");
    const std::string context_ref = param_or_header(step, ctx, "context-reference");

    auto response = ctx.utility.call(step.usp_ref, Document{{"op", "validate"},
                                                            {"token", msg.header("token")},
                                                            {"context-reference", context_ref}});
    if (response.contains("fault"))
      throw StepFailure("token-validate", response.at("fault").get<std::string>());

    if (!response.at("valid").get<bool>()) {
      const auto reason = response.at("reason").get<std::string>();
      if (reason == "invalid-claims") {
        // authenticated requestor, unusable claims: this is the signal the
        // adaptation loop counts
        ctx.sink.record(core::EventType::InvalidClaims, ctx.origin, context_ref,
                        {{"issuer", response.at("issuer").get<std::string>()},
                         {"subject", response.at("subject").get<std::string>()}});
      }
      throw StepFailure(reason, "token validation failed");
    }
    if (step.params.contains("issuer") &&
        response.at("issuer").get<std::string>() != step.params.at("issuer").get<std::string>())
      throw StepFailure("issuer-mismatch",
                        "token issued by " + response.at("issuer").get<std::string>());

    msg.annotations["claims"] = response.at("claims");
    msg.annotations["subject"] = response.at("subject");
    msg.annotations["token-issuer"] = response.at("issuer");
    msg.annotations["proof-key"] = response.at("proof-key");
  }
};

class Authorize final : public Interceptor {
 public:
  void execute(const Step& step, ProcessingContext& ctx) override {
    Message& msg = ctx.message;
    std::string subject;
    if (msg.annotations.contains("subject"))
      subject = msg.annotations.at("subject").get<std::string>();
    else
      subject = msg.header("subject");
    if (subject.empty()) throw StepFailure("no-subject", "no validated subject to authorize");
    const std::string action = msg.header("action");
    if (action.empty()) throw StepFailure("no-action", "message carries no action header");
    const std::string resource = msg.header("resource");
    if (resource.empty()) throw StepFailure("no-resource", "message carries no resource header");

    Document attributes = Document::array();
    auto push_attr = [&](const std::string& category, const std::string& id,
                         const Document& loose) {
      Document attr = core::value_to_document(core::value_from_loose(loose));
      attr["category"] = category;
      attr["id"] = id;
      attributes.push_back(std::move(attr));
    };
    push_attr("subject", "subject.id", Document(subject));
    if (msg.annotations.contains("claims"))
      for (const auto& claim : msg.annotations.at("claims"))
        push_attr("subject", claim.at("name").get<std::string>(), claim.at("value"));
    push_attr("action", "action.id", Document(action));
    if (msg.has_header("context-reference"))
      push_attr("environment", "environment.federation",
                Document(msg.header("context-reference")));

    Document request{{"attributes", attributes},
                     {"context-id", msg.correlation_id()},
                     {"resources", Document::array({resource})}};
    auto response = ctx.utility.call(step.usp_ref, Document{{"op", "decide"},
                                                            {"request", request}});
    if (response.contains("fault"))
      throw StepFailure("authz-fault", response.at("fault").get<std::string>());

    const auto& result = response.at("results").at(0);
    const auto decision = result.at("decision").get<std::string>();
    ctx.sink.record(core::EventType::AuthzDecision, ctx.origin,
                    msg.header("context-reference"),
                    {{"decision", decision},
                     {"resource", resource},
                     {"subject", subject}});
    msg.annotations["authz-decision"] = decision;
    if (decision != "Permit") throw StepFailure("authz-" + decision, "access not permitted");
    for (const auto& ob : result.at("obligations")) enforce_obligation(ob, ctx);
  }
};

class SignElements final : public Interceptor {
 public:
  void execute(const Step& step, ProcessingContext& ctx) override {
    Message& msg = ctx.message;
    if (!msg.annotations.contains("proof-key-private"))
      throw StepFailure("no-proof-key", "sign-elements needs the issued proof key");
    auto key = core::from_base64(msg.annotations.at("proof-key-private").get<std::string>());
    for (const auto& path : path_list(step)) {
      const Document* el = element_at(msg.body, path);
      if (!el) throw StepFailure("missing-element", path);
      auto sig = core::sign_bytes(core::canonicalize(*el), key);
      msg.headers["sig." + path] = core::to_base64(sig);
    }
  }
};

class VerifyElements final : public Interceptor {
 public:
  void execute(const Step& step, ProcessingContext& ctx) override {
    Message& msg = ctx.message;
    if (!msg.annotations.contains("proof-key"))
      throw StepFailure("no-proof-key", "verify-elements needs a validated token first");
    auto key = core::from_base64(msg.annotations.at("proof-key").get<std::string>());
    for (const auto& path : path_list(step)) {
      const Document* el = element_at(msg.body, path);
      if (!el) throw StepFailure("missing-element", path);
      if (!msg.has_header("sig." + path))
        throw StepFailure("element-signature", "no signature over " + path);
      auto sig = core::from_base64(msg.header("sig." + path));
      if (!core::verify_bytes(core::canonicalize(*el), sig, key))
        throw StepFailure("element-signature", "signature over " + path + " does not verify");
    }
  }
};

class EncryptElements final : public Interceptor {
 public:
  void execute(const Step& step, ProcessingContext& ctx) override {
    auto key = fetch_key(step, ctx);
    for (const auto& path : path_list(step)) {
      const Document* el = element_at(ctx.message.body, path);
      if (!el) throw StepFailure("missing-element", path);
      set_element(ctx.message.body, path, ctx.cipher->encrypt(*el, key));
    }
  }
};

class DecryptElements final : public Interceptor {
 public:
  void execute(const Step& step, ProcessingContext& ctx) override {
    auto key = fetch_key(step, ctx);
    for (const auto& path : path_list(step)) {
      const Document* el = element_at(ctx.message.body, path);
      if (!el) throw StepFailure("missing-element", path);
      if (!is_encrypted_element(*el))
        throw StepFailure("not-encrypted", "element " + path + " is not encrypted");
      try {
        set_element(ctx.message.body, path, ctx.cipher->decrypt(*el, key));
      } catch (const std::exception& e) {
        throw StepFailure("decrypt", e.what());
      }
    }
  }
};

class Transform final : public Interceptor {
 public:
  void execute(const Step& step, ProcessingContext& ctx) override {
    Message& msg = ctx.message;
    if (step.params.contains("set"))
      for (auto it = step.params.at("set").begin(); it != step.params.at("set").end(); ++it)
        set_element(msg.body, it.key(), it.value());
    if (step.params.contains("remove"))
      for (const auto& p : step.params.at("remove")) remove_element(msg.body, p.get<std::string>());
    if (step.params.contains("copy"))
      for (const auto& c : step.params.at("copy")) {
        const Document* from = element_at(msg.body, c.at("from").get<std::string>());
        if (!from) throw StepFailure("missing-element", c.at("from").get<std::string>());
        set_element(msg.body, c.at("to").get<std::string>(), *from);
      }
  }
};

class Route final : public Interceptor {
 public:
  void execute(const Step& step, ProcessingContext& ctx) override {
    if (!step.params.contains("next-hop"))
      throw StepFailure("bad-params", "route without next-hop");
    const auto hop = step.params.at("next-hop").get<std::string>();
    if (!core::is_valid_endpoint_uri(hop)) throw StepFailure("bad-params", "invalid hop " + hop);
    ctx.message.headers["next-hop"] = hop;
  }
};

class AuditEmit final : public Interceptor {
 public:
  void execute(const Step& step, ProcessingContext& ctx) override {
    std::map<std::string, std::string> payload{{"step", "audit-emit"}};
    if (step.params.contains("payload"))
      for (auto it = step.params.at("payload").begin(); it != step.params.at("payload").end();
           ++it)
        payload[it.key()] = it.value().get<std::string>();
    payload["correlation"] = ctx.message.correlation_id();
    ctx.sink.record(core::EventType::MessageProcessed, ctx.origin,
                    ctx.message.header("context-reference"), std::move(payload));
  }
};

class ApplyPolicy final : public Interceptor {
 public:
  void execute(const Step& step, ProcessingContext& ctx) override {
    if (!step.params.contains("ecp"))
      throw StepFailure("bad-params", "apply-policy without an ecp reference");
    ctx.run_nested(step.params.at("ecp").get<std::string>());
  }
};

}  // namespace

void InterceptorRegistry::add(const std::string& impl_id, Factory factory) {
  factories_[impl_id] = std::move(factory);
}

std::set<std::string> InterceptorRegistry::impl_ids() const {
  std::set<std::string> out;
  for (const auto& [id, f] : factories_) out.insert(id);
  return out;
}

std::unique_ptr<Interceptor> InterceptorRegistry::create(const std::string& impl_id,
                                                         const Document& config) const {
  auto it = factories_.find(impl_id);
  if (it == factories_.end())
    throw BadInterceptorConfig("no interceptor implementation " + impl_id);
  auto interceptor = it->second(config);
  if (!interceptor) throw BadInterceptorConfig("factory for " + impl_id + " produced nothing");
  return interceptor;
}

InterceptorRegistry InterceptorRegistry::with_builtins() {
  InterceptorRegistry reg;
  reg.add("builtin.validate-structure", [](const Document&) { return std::make_unique<ValidateStructure>(); });
  reg.add("builtin.insert-token", [](const Document&) { return std::make_unique<InsertToken>(); });
  reg.add("builtin.validate-token", [](const Document&) { return std::make_unique<ValidateToken>(); });
  reg.add("builtin.authorize", [](const Document&) { return std::make_unique<Authorize>(); });
  reg.add("builtin.sign-elements", [](const Document&) { return std::make_unique<SignElements>(); });
  reg.add("builtin.verify-elements", [](const Document&) { return std::make_unique<VerifyElements>(); });
  reg.add("builtin.encrypt-elements", [](const Document&) { return std::make_unique<EncryptElements>(); });
  reg.add("builtin.decrypt-elements", [](const Document&) { return std::make_unique<DecryptElements>(); });
  reg.add("builtin.transform", [](const Document&) { return std::make_unique<Transform>(); });
  reg.add("builtin.route", [](const Document&) { return std::make_unique<Route>(); });
  reg.add("builtin.audit-emit", [](const Document&) { return std::make_unique<AuditEmit>(); });
  reg.add("builtin.apply-policy", [](const Document&) { return std::make_unique<ApplyPolicy>(); });
  return reg;
}

std::vector<std::unique_ptr<Interceptor>> assemble_chain(const Ecp& ecp, const Irp& irp,
                                                         const InterceptorRegistry& registry) {
  std::vector<std::unique_ptr<Interceptor>> chain;
  chain.reserve(ecp.steps.size());
  for (const auto& step : ecp.steps) {
    auto binding = irp.bindings.find(step.action);
    if (binding == irp.bindings.end())
      throw UnmappedAction("no interceptor mapped for action " + step.action);
    chain.push_back(registry.create(binding->second.impl_id, binding->second.config));
  }
  return chain;
}

GuardLookup make_guard_lookup(const Message& message, const Document& state) {
  return [&message, &state](const std::string& ref) -> std::optional<Document> {
    if (ref.rfind("header.", 0) == 0) {
      const auto name = ref.substr(7);
      if (!message.has_header(name)) return std::nullopt;
      return Document(message.header(name));
    }
    if (ref.rfind("annotation.", 0) == 0) {
      const auto name = ref.substr(11);
      if (!message.annotations.contains(name)) return std::nullopt;
      return message.annotations.at(name);
    }
    if (ref.rfind("state.", 0) == 0) {
      const auto name = ref.substr(6);
      if (!state.is_object() || !state.contains(name)) return std::nullopt;
      return state.at(name);
    }
    if (ref.rfind("body.", 0) == 0) {
      const Document* el = element_at(message.body, ref.substr(5));
      if (!el) return std::nullopt;
      return *el;
    }
    return std::nullopt;
  };
}

Irp builtin_irp() {
  Irp irp;
  for (const char* action :
       {"validate-structure", "insert-token", "validate-token", "authorize", "sign-elements",
        "verify-elements", "encrypt-elements", "decrypt-elements", "transform", "route",
        "audit-emit", "apply-policy"})
    irp.bindings[action] = Irp::Binding{std::string("builtin.") + action, Document::object()};
  return irp;
}

}  // namespace fedsec::gateway
