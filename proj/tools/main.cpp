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

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "fedsec/gateway/instance.hpp"
#include "fedsec/harness/runtime.hpp"
#include "fedsec/pdp/engine.hpp"
#include "fedsec/sts/broker.hpp"

using namespace fedsec;
using core::Document;

namespace {

// exit codes: 0 success, 1 operation denied / invalid result, 2 usage or
// configuration error
constexpr int kOk = 0;
constexpr int kDenied = 1;
constexpr int kUsage = 2;

bool g_canonical = false;

void emit(const Document& doc, const std::string& human) {
  if (g_canonical)
    std::cout << core::canonicalize(doc) << "\n";
  else
    std::cout << human << "\n";
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string default_registry_path() {
  const char* env = std::getenv("FEDSEC_KEY_REGISTRY");
  return env ? env : "";
}

core::KeyRegistry load_registry(const std::string& path) {
  if (path.empty()) return core::KeyRegistry();
  return core::KeyRegistry::from_document(core::read_document_file(path));
}

pdp::PolicyStore load_store(const std::string& dir, const std::string& registry_path,
                            const std::vector<std::string>& trusted) {
  return pdp::PolicyStore::load_directory(
      dir, load_registry(registry_path),
      std::set<std::string>(trusted.begin(), trusted.end()), core::system_clock());
}

std::string matrix_table(const Document& matrix) {
  std::vector<std::string> brokers;
  for (const auto& b : matrix.at("brokers")) brokers.push_back(b.get<std::string>());
  std::size_t width = 3;  // fits yes/no
  for (const auto& b : brokers) width = std::max(width, b.size());

  std::string out = "validity matrix for context " +
                    matrix.at("context").get<std::string>() + " (rows validate columns)\n";
  out += std::string(width, ' ');
  for (std::size_t i = 0; i < brokers.size(); ++i) {
    out += "  ";
    out += i + 1 == brokers.size() ? brokers[i] : pad(brokers[i], width);
  }
  out += "\n";
  for (const auto& validator : brokers) {
    out += pad(validator, width);
    for (std::size_t i = 0; i < brokers.size(); ++i) {
      const bool ok = matrix.at("matrix").at(validator).at(brokers[i]).get<bool>();
      out += "  ";
      out += i + 1 == brokers.size() ? std::string(ok ? "yes" : "no")
                                     : pad(ok ? "yes" : "no", width);
    }
    out += "\n";
  }
  out.pop_back();  // no trailing newline; emit() adds one
  return out;
}

// ---------------------------------------------------------------------- keys

int cmd_keys_gen(const std::string& id, const std::string& out, const std::string& seed) {
  auto key = seed.empty() ? core::KeyPair::generate()
                          : core::KeyPair::from_seed(std::string_view(seed));
  Document doc = key.to_document();
  doc["id"] = id;
  core::write_document_file(out, doc);
  emit(Document{{"id", id}, {"public", core::to_base64(key.public_key)}},
       "generated keypair " + id + " -> " + out + "\npublic: " + core::to_base64(key.public_key));
  return kOk;
}

int cmd_keys_register(const std::string& registry_path, const std::string& id,
                      const std::string& key_ref) {
  core::KeyRegistry registry;
  if (std::filesystem::exists(registry_path))
    registry = core::KeyRegistry::from_document(core::read_document_file(registry_path));
  core::Bytes public_key;
  if (std::filesystem::exists(key_ref)) {
    auto key = core::KeyPair::from_document(core::read_document_file(key_ref));
    public_key = key.public_key;
  } else {
    public_key = core::from_base64(key_ref);
  }
  registry.add(id, public_key);
  core::write_document_file(registry_path, registry.to_document());
  emit(Document{{"id", id}, {"registry", registry_path}},
       "registered " + id + " in " + registry_path);
  return kOk;
}

// ----------------------------------------------------------------------- pap

int cmd_pap(const std::string& op, const std::string& store_dir, const std::string& principal,
            const std::string& registry_path, const std::vector<std::string>& trusted,
            const std::string& policy_file, const std::string& policy_id) {
  auto store = load_store(store_dir, registry_path, trusted);
  const auto pap_op = pdp::pap_op_from_string(op);
  switch (pap_op) {
    case pdp::PapOp::Add: {
      if (policy_file.empty()) throw CLI::ValidationError("--policy is required for add");
      auto envelope =
          core::SignedDocument::from_document(core::read_document_file(policy_file));
      const auto& policy = store.pap_add(principal, envelope);
      emit(policy.body_document(), "added policy " + policy.id);
      break;
    }
    case pdp::PapOp::Remove:
      store.pap_remove(principal, policy_id);
      emit(Document{{"removed", policy_id}}, "removed policy " + policy_id);
      break;
    case pdp::PapOp::Enable:
      store.pap_enable(principal, policy_id);
      emit(Document{{"enabled", policy_id}}, "enabled policy " + policy_id);
      break;
    case pdp::PapOp::Disable:
      store.pap_disable(principal, policy_id);
      emit(Document{{"disabled", policy_id}}, "disabled policy " + policy_id);
      break;
    case pdp::PapOp::List: {
      Document listing = Document::array();
      std::string table;
      for (const auto* record : store.pap_list(principal)) {
        listing.push_back(Document{{"enabled", record->enabled},
                                   {"id", record->policy.id},
                                   {"issuer", record->policy.issuer
                                                  ? Document(*record->policy.issuer)
                                                  : Document(nullptr)},
                                   {"kind", pdp::to_string(record->policy.kind)},
                                   {"loaded-at", record->loaded_at}});
        table += record->policy.id + "  " + pdp::to_string(record->policy.kind) + "  " +
                 (record->enabled ? "enabled" : "disabled") + "  issuer=" +
                 (record->policy.issuer ? *record->policy.issuer : "-") + "\n";
      }
      if (!table.empty()) table.pop_back();
      emit(listing, table.empty() ? "(no policies)" : table);
      return kOk;  // list never mutates
    }
  }
  store.save_directory(store_dir);
  return kOk;
}

// ----------------------------------------------------------------------- pdp

int cmd_pdp_decide(const std::string& store_dir, const std::string& request_file,
                   const std::string& registry_path, const std::vector<std::string>& trusted,
                   const std::vector<std::string>& provider_files, bool partial_eval) {
  auto store = load_store(store_dir, registry_path, trusted);
  std::vector<pdp::AttributeProviderPtr> providers;
  for (const auto& file : provider_files)
    providers.push_back(pdp::MapAttributeProvider::from_document(core::read_document_file(file)));
  auto request = pdp::DecisionRequest::from_document(core::read_document_file(request_file));
  pdp::DecisionEngine engine(store, providers, pdp::EngineOptions{partial_eval});
  auto response = engine.decide(request);

  std::string table;
  for (const auto& result : response.results)
    table += result.resource_id + ": " + pdp::to_string(result.decision) + "\n";
  for (const auto& entry : response.trace) {
    table += "  [" + entry.resource_id + "] " + entry.policy_id + " -> " +
             pdp::to_string(entry.decision);
    if (!entry.delegation_chain.empty()) {
      table += " (chain:";
      for (const auto& link : entry.delegation_chain) table += " " + link;
      table += ")";
    }
    table += "\n";
  }
  if (!table.empty()) table.pop_back();
  emit(response.to_document(), table);
  return kOk;  // a decision is a success, whatever it decides
}

// ----------------------------------------------------------------------- sts

sts::BrokerPtr load_broker(const std::string& config) {
  return sts::Broker::from_document(core::read_document_file(config), core::system_clock(),
                                    nullptr);
}

int cmd_sts_issue(const std::string& config, const std::string& context,
                  const std::string& subject, const std::string& secret,
                  const std::string& out_file) {
  auto broker = load_broker(config);
  sts::TokenRequest request;
  request.requester = subject;
  request.credential = Document{{"scheme", "shared-secret"}, {"secret", secret}};
  request.metadata = {{"context-reference", context}};
  auto issued = broker->issue(request);
  const Document envelope = issued.envelope.to_document();
  if (!out_file.empty()) core::write_document_file(out_file, envelope);
  emit(Document{{"proof-key-private", core::to_base64(issued.proof_key_private)},
                {"token", envelope}},
       "issued " + issued.token.token_id + " for " + subject + " in " +
           issued.token.federation_id +
           (out_file.empty() ? "" : " -> " + out_file));
  return kOk;
}

int cmd_sts_validate(const std::string& config, const std::string& context,
                     const std::string& token_file) {
  auto broker = load_broker(config);
  auto result = broker->validate(
      core::SignedDocument::from_document(core::read_document_file(token_file)), context);
  Document claims = Document::array();
  for (const auto& claim : result.claims) claims.push_back(claim.to_document());
  emit(Document{{"claims", claims},
                {"issuer", result.issuer},
                {"reason", result.reason},
                {"subject", result.subject},
                {"valid", result.valid}},
       result.valid ? "valid token for " + result.subject + " issued by " + result.issuer
                    : "invalid token: " + result.reason);
  return result.valid ? kOk : kDenied;
}

int cmd_sts_exchange(const std::string& config, const std::string& target_context,
                     const std::string& token_file, const std::string& out_file) {
  auto broker = load_broker(config);
  auto issued = broker->exchange(
      core::SignedDocument::from_document(core::read_document_file(token_file)), target_context);
  const Document envelope = issued.envelope.to_document();
  if (!out_file.empty()) core::write_document_file(out_file, envelope);
  emit(Document{{"token", envelope}},
       "exchanged into " + issued.token.token_id + " in " + issued.token.federation_id);
  return kOk;
}

// ------------------------------------------------------------------- gateway

/// The CLI gateway keeps instance status and bundle history in a state file
/// next to the config, so lifecycle operations are observable across
/// invocations. An optional scenario file provides the utility-service
/// fabric (broker, decision point, key store endpoints).
struct CliGateway {
  Document config;
  std::string state_path;
  std::unique_ptr<harness::ScenarioRuntime> runtime;  // owns the directory
  gateway::ServiceDirectory local_directory;
  std::unique_ptr<gateway::GatewayInstance> instance;

  explicit CliGateway(const std::string& config_path) {
    config = core::read_document_file(config_path);
    state_path = config.value("state-file", config_path + ".state");
    const gateway::ServiceDirectory* directory = &local_directory;
    if (config.contains("scenario")) {
      auto scenario_path =
          std::filesystem::path(config_path).parent_path() /
          config.at("scenario").get<std::string>();
      runtime = harness::ScenarioRuntime::load_file(scenario_path.string());
      directory = runtime->directory();
    }
    instance = std::make_unique<gateway::GatewayInstance>(
        config.value("instance", std::string("gateway")), directory,
        nullptr, core::system_clock(), config.value("nesting-cap", 4));

    if (std::filesystem::exists(state_path)) {
      Document state = core::read_document_file(state_path);
      for (const auto& bundle_doc : state.at("history")) {
        auto bundle = gateway::Bundle::from_document(bundle_doc);
        instance->lifecycle(gateway::LifecycleOp::Load, &bundle);
      }
      const auto status = state.at("status").get<std::string>();
      if (status == "active") instance->lifecycle(gateway::LifecycleOp::Activate);
      if (status == "destroyed") instance->lifecycle(gateway::LifecycleOp::Destroy);
    }
  }

  gateway::Bundle config_bundle() const {
    if (!config.contains("bundle"))
      throw core::SchemaError("instance config has no bundle");
    return gateway::Bundle::from_document(config.at("bundle"));
  }

  void save() {
    Document history = Document::array();
    for (const auto& bundle : instance->history()) history.push_back(bundle->to_document());
    Document state{{"history", history},
                   {"status", gateway::to_string(instance->status())}};
    core::write_document_file(state_path, state);
  }
};

int cmd_gateway_lifecycle(const std::string& config_path, const std::string& op,
                          const std::string& bundle_file) {
  CliGateway cli(config_path);
  const auto lifecycle_op = gateway::lifecycle_op_from_string(op);
  if (lifecycle_op == gateway::LifecycleOp::Load) {
    gateway::Bundle bundle = bundle_file.empty()
                                 ? cli.config_bundle()
                                 : gateway::Bundle::from_document(
                                       core::read_document_file(bundle_file));
    cli.instance->lifecycle(lifecycle_op, &bundle);
  } else {
    cli.instance->lifecycle(lifecycle_op);
  }
  cli.save();
  emit(Document{{"status", gateway::to_string(cli.instance->status())}},
       "instance " + cli.instance->id() + " is now " +
           gateway::to_string(cli.instance->status()));
  return kOk;
}

int cmd_gateway_run(const std::string& config_path, const std::string& message_file) {
  CliGateway cli(config_path);
  auto message = gateway::Message::from_document(core::read_document_file(message_file));
  auto result = cli.instance->process(std::move(message));
  cli.save();
  emit(result.to_document(),
       std::string(result.forwarded() ? "forwarded" : "rejected") +
           (result.failure.empty() ? "" : " (" + result.failure + ")"));
  return result.forwarded() ? kOk : kDenied;
}

int cmd_gateway_derive_cep(const std::string& ecp_file) {
  auto ecp = gateway::Ecp::from_document(core::read_document_file(ecp_file));
  auto cep = gateway::derive_cep(ecp);
  std::string table = "cep " + cep.id + " (" + std::to_string(cep.assertions.size()) +
                      " assertions)";
  for (const auto& assertion : cep.assertions)
    table += "\n  " + assertion.id + ": " + gateway::to_string(assertion.kind);
  emit(cep.to_document(), table);
  return kOk;
}

// ------------------------------------------------------------------ scenario

int cmd_scenario_run(const std::string& file, int until, const std::string& matrix_context) {
  auto runtime = harness::ScenarioRuntime::load_file(file);
  if (!matrix_context.empty()) {
    auto matrix = runtime->validity_matrix(matrix_context);
    emit(matrix, matrix_table(matrix));
    return kOk;
  }
  Document transcripts = Document::array();
  std::string table;
  const auto& script = runtime->script();
  const std::size_t count =
      until < 0 ? script.size() : std::min<std::size_t>(until, script.size());
  for (std::size_t i = 0; i < count; ++i) {
    auto transcript = runtime->run_request(script[i]);
    table += "step " + std::to_string(i + 1) + ": " + script[i].subject + " " +
             script[i].action + " " + script[i].resource + " @ " + script[i].target_org +
             " -> " + transcript.at("outcome").get<std::string>() + "\n";
    transcripts.push_back(std::move(transcript));
  }
  if (!table.empty()) table.pop_back();
  emit(Document{{"transcripts", transcripts}}, table.empty() ? "(empty script)" : table);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fedsec: policy enforcement gateway, identity broker and authorization toolkit"};
  app.require_subcommand(1);
  std::string format = "table";
  app.add_option("--format", format, "output format: table or canonical")
      ->check(CLI::IsMember({"table", "canonical"}));

  // keys
  auto* keys = app.add_subcommand("keys", "keypair and registry management");
  keys->require_subcommand(1);
  std::string key_id, key_out, key_seed, key_registry = default_registry_path(), key_ref;
  auto* keys_gen = keys->add_subcommand("gen", "generate a keypair file");
  keys_gen->add_option("--id", key_id, "principal id")->required();
  keys_gen->add_option("--out", key_out, "keypair file")->required();
  keys_gen->add_option("--seed", key_seed, "derive deterministically from seed text");
  auto* keys_register = keys->add_subcommand("register", "add a verification key to a registry");
  keys_register->add_option("--registry", key_registry, "registry file")
      ->required(default_registry_path().empty());
  keys_register->add_option("--id", key_id, "principal id")->required();
  keys_register->add_option("--key", key_ref, "keypair file or base64 public key")->required();

  // pap
  auto* pap = app.add_subcommand("pap", "policy administration point");
  pap->require_subcommand(1);
  std::string pap_store, pap_principal, pap_registry = default_registry_path(), pap_policy_file,
              pap_policy_id;
  std::vector<std::string> pap_trusted;
  std::string pap_selected_op;
  for (const char* op : {"add", "rm", "enable", "disable", "list"}) {
    auto* sub = pap->add_subcommand(op);
    sub->add_option("--store", pap_store, "policy store directory")->required();
    sub->add_option("--as", pap_principal, "acting principal")->required();
    sub->add_option("--registry", pap_registry, "key registry file")
        ->required(default_registry_path().empty());
    sub->add_option("--trusted", pap_trusted, "trusted authority principal (repeatable)");
    if (std::string(op) == "add")
      sub->add_option("--policy", pap_policy_file, "signed policy file")->required();
    else if (std::string(op) != "list")
      sub->add_option("--id", pap_policy_id, "policy id")->required();
    sub->callback([op, &pap_selected_op] { pap_selected_op = op; });
  }

  // pdp
  auto* pdp_cmd = app.add_subcommand("pdp", "authorization decision point");
  pdp_cmd->require_subcommand(1);
  auto* decide = pdp_cmd->add_subcommand("decide", "evaluate a decision request");
  std::string pdp_store, pdp_request, pdp_registry = default_registry_path();
  std::vector<std::string> pdp_trusted, pdp_providers;
  bool pdp_partial = false;
  decide->add_option("--store", pdp_store, "policy store directory")->required();
  decide->add_option("--request", pdp_request, "decision request file")->required();
  decide->add_option("--registry", pdp_registry, "key registry file")
      ->required(default_registry_path().empty());
  decide->add_option("--trusted", pdp_trusted, "trusted authority principal (repeatable)");
  decide->add_option("--provider", pdp_providers, "attribute provider file (repeatable)");
  decide->add_flag("--partial-eval", pdp_partial, "enable the partial-evaluation pre-filter");

  // sts
  auto* sts_cmd = app.add_subcommand("sts", "security token service operations");
  sts_cmd->require_subcommand(1);
  std::string sts_config, sts_context, sts_subject, sts_secret, sts_token, sts_out;
  auto* issue = sts_cmd->add_subcommand("issue", "issue a token");
  issue->add_option("--broker", sts_config, "broker config file")->required();
  issue->add_option("--context", sts_context, "context reference")->required();
  issue->add_option("--subject", sts_subject, "requesting subject")->required();
  issue->add_option("--secret", sts_secret, "shared secret")->required();
  issue->add_option("--out", sts_out, "write the token envelope here");
  auto* validate = sts_cmd->add_subcommand("validate", "validate a token");
  validate->add_option("--broker", sts_config, "broker config file")->required();
  validate->add_option("--context", sts_context, "context reference")->required();
  validate->add_option("--token", sts_token, "token envelope file")->required();
  auto* exchange = sts_cmd->add_subcommand("exchange", "exchange a token into another context");
  exchange->add_option("--broker", sts_config, "broker config file")->required();
  exchange->add_option("--context", sts_context, "target context reference")->required();
  exchange->add_option("--token", sts_token, "token envelope file")->required();
  exchange->add_option("--out", sts_out, "write the new token envelope here");

  // gateway
  auto* gw = app.add_subcommand("gateway", "enforcement point operations");
  gw->require_subcommand(1);
  std::string gw_config, gw_message, gw_op, gw_bundle, gw_ecp;
  auto* gw_run = gw->add_subcommand("run", "process one message");
  gw_run->add_option("--instance", gw_config, "instance config file")->required();
  gw_run->add_option("--message", gw_message, "message file")->required();
  auto* gw_lifecycle = gw->add_subcommand("lifecycle", "apply a lifecycle operation");
  gw_lifecycle->add_option("--instance", gw_config, "instance config file")->required();
  gw_lifecycle->add_option("--op", gw_op, "load|activate|deactivate|destroy|rollback")
      ->required();
  gw_lifecycle->add_option("--bundle", gw_bundle, "bundle file for load");
  auto* gw_cep = gw->add_subcommand("derive-cep", "derive the published CEP from an ECP");
  gw_cep->add_option("--ecp", gw_ecp, "ecp file")->required();

  // scenario
  auto* scenario = app.add_subcommand("scenario", "multi-organization scenario runner");
  scenario->require_subcommand(1);
  auto* scenario_run = scenario->add_subcommand("run", "load a scenario and run its script");
  std::string scenario_file, scenario_matrix;
  int scenario_until = -1;
  scenario_run->add_option("file", scenario_file, "scenario file")->required();
  scenario_run->add_option("--until", scenario_until, "run only the first N script steps");
  scenario_run->add_option("--matrix", scenario_matrix,
                           "print the issuer/validator validity matrix for a context");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << "\n";
    return kUsage;
  }
  g_canonical = format == "canonical";

  try {
    if (keys_gen->parsed()) return cmd_keys_gen(key_id, key_out, key_seed);
    if (keys_register->parsed()) return cmd_keys_register(key_registry, key_id, key_ref);
    if (!pap_selected_op.empty())
      return cmd_pap(pap_selected_op, pap_store, pap_principal, pap_registry, pap_trusted,
                     pap_policy_file, pap_policy_id);
    if (decide->parsed())
      return cmd_pdp_decide(pdp_store, pdp_request, pdp_registry, pdp_trusted, pdp_providers,
                            pdp_partial);
    if (issue->parsed()) return cmd_sts_issue(sts_config, sts_context, sts_subject, sts_secret,
                                              sts_out);
    if (validate->parsed()) return cmd_sts_validate(sts_config, sts_context, sts_token);
    if (exchange->parsed()) return cmd_sts_exchange(sts_config, sts_context, sts_token, sts_out);
    if (gw_run->parsed()) return cmd_gateway_run(gw_config, gw_message);
    if (gw_lifecycle->parsed()) return cmd_gateway_lifecycle(gw_config, gw_op, gw_bundle);
    if (gw_cep->parsed()) return cmd_gateway_derive_cep(gw_ecp);
    if (scenario_run->parsed())
      return cmd_scenario_run(scenario_file, scenario_until, scenario_matrix);
    std::cerr << "no command selected\n";
    return kUsage;
  } catch (const pdp::Forbidden& e) {
    std::cerr << "forbidden: " << e.what() << "\n";
    return kDenied;
  } catch (const pdp::NotFound& e) {
    std::cerr << "not found: " << e.what() << "\n";
    return kDenied;
  } catch (const pdp::BadSignature& e) {
    std::cerr << "bad signature: " << e.what() << "\n";
    return kDenied;
  } catch (const pdp::UntrustedRootSigner& e) {
    std::cerr << "untrusted signer: " << e.what() << "\n";
    return kDenied;
  } catch (const pdp::DuplicatePolicyId& e) {
    std::cerr << "duplicate policy: " << e.what() << "\n";
    return kDenied;
  } catch (const pdp::RequestError& e) {
    std::cerr << "bad request: " << e.what() << "\n";
    return kUsage;
  } catch (const sts::AuthenticationFailed& e) {
    std::cerr << "authentication failed: " << e.what() << "\n";
    return kDenied;
  } catch (const sts::UnknownSubject& e) {
    std::cerr << "unknown subject: " << e.what() << "\n";
    return kDenied;
  } catch (const sts::SourceInvalid& e) {
    std::cerr << "source token invalid: " << e.what() << "\n";
    return kDenied;
  } catch (const sts::NoClaimsAvailable& e) {
    std::cerr << "no claims available: " << e.what() << "\n";
    return kDenied;
  } catch (const sts::FederationNotFound& e) {
    std::cerr << "federation not found: " << e.what() << "\n";
    return kDenied;
  } catch (const sts::ManagementForbidden& e) {
    std::cerr << "forbidden: " << e.what() << "\n";
    return kDenied;
  } catch (const gateway::IllegalTransition& e) {
    std::cerr << "illegal transition: " << e.what() << "\n";
    return kDenied;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
