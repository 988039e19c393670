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

#include "fedsec/pdp/store.hpp"

#include <filesystem>
#include <fstream>

namespace fedsec::pdp {

namespace fs = std::filesystem;

Document ChangeLogEntry::to_document() const {
  return Document{{"note", note},
                  {"operation", operation},
                  {"policy", policy_id},
                  {"principal", principal},
                  {"wall", wall}};
}

ChangeLogEntry ChangeLogEntry::from_document(const Document& doc) {
  ChangeLogEntry e;
  e.wall = doc.at("wall").get<std::int64_t>();
  e.principal = doc.at("principal").get<std::string>();
  e.operation = doc.at("operation").get<std::string>();
  e.policy_id = doc.at("policy").get<std::string>();
  if (doc.contains("note")) e.note = doc.at("note").get<std::string>();
  return e;
}

std::string to_string(PapOp op) {
  switch (op) {
    case PapOp::Add: return "add";
    case PapOp::Remove: return "remove";
    case PapOp::Enable: return "enable";
    case PapOp::Disable: return "disable";
    case PapOp::List: return "list";
  }
  return "list";
}

PapOp pap_op_from_string(const std::string& s) {
  if (s == "add") return PapOp::Add;
  if (s == "remove" || s == "rm") return PapOp::Remove;
  if (s == "enable") return PapOp::Enable;
  if (s == "disable") return PapOp::Disable;
  if (s == "list") return PapOp::List;
  throw core::SchemaError("unknown pap operation: " + s);
}

PolicyStore::PolicyStore(core::KeyRegistry registry, std::set<std::string> trusted_authorities,
                         core::ClockPtr clock)
    : registry_(std::move(registry)), trusted_(std::move(trusted_authorities)),
      clock_(std::move(clock)) {}

void PolicyStore::log(const std::string& principal, const std::string& operation,
                      const std::string& policy_id, const std::string& note) {
  change_log_.push_back({clock_->now_unix(), principal, operation, policy_id, note});
}

const AuthzPolicy& PolicyStore::index(const core::SignedDocument& doc,
                                      const std::string& principal) {
  // Parse and verify before touching either compartment, so rejection is
  // atomic.
  AuthzPolicy policy = AuthzPolicy::parse_body(doc.body);
  if (!doc.verify(registry_))
    throw BadSignature("signature on policy " + policy.id + " does not verify");

  if (policy.kind == PolicyKind::Root) {
    if (!is_trusted(doc.signer))
      throw UntrustedRootSigner("root policy " + policy.id + " signed by untrusted " + doc.signer);
    policy.issuer.reset();
  } else {
    policy.issuer = doc.signer;
  }

  if (find(policy.id)) throw DuplicatePolicyId("policy id already loaded: " + policy.id);

  auto& compartment = policy.kind == PolicyKind::Root ? root_ : delegated_;
  PolicyRecord record{std::move(policy), doc, true, clock_->now_unix()};
  auto [it, inserted] = compartment.emplace(record.policy.id, std::move(record));
  log(principal, "add", it->first);
  return it->second.policy;
}

const AuthzPolicy& PolicyStore::load(const core::SignedDocument& doc) {
  return index(doc, "loader");
}

void PolicyStore::require_registered(const std::string& principal) const {
  if (!registry_.contains(principal))
    throw Forbidden("unknown principal: " + principal);
}

const AuthzPolicy& PolicyStore::pap_add(const std::string& principal,
                                        const core::SignedDocument& doc) {
  require_registered(principal);
  AuthzPolicy parsed = AuthzPolicy::parse_body(doc.body);
  const bool root_compartment = parsed.kind == PolicyKind::Root;
  const bool allowed =
      root_compartment ? is_trusted(principal) : (is_trusted(principal) || principal == doc.signer);
  if (!allowed) {
    log(principal, "denied:add", parsed.id);
    throw Forbidden(principal + " may not add to the " +
                    (root_compartment ? std::string("root") : std::string("delegated")) +
                    " compartment");
  }
  return index(doc, principal);
}

PolicyRecord* PolicyStore::find_mutable(const std::string& policy_id) {
  if (auto it = root_.find(policy_id); it != root_.end()) return &it->second;
  if (auto it = delegated_.find(policy_id); it != delegated_.end()) return &it->second;
  return nullptr;
}

const PolicyRecord* PolicyStore::find(const std::string& policy_id) const {
  if (auto it = root_.find(policy_id); it != root_.end()) return &it->second;
  if (auto it = delegated_.find(policy_id); it != delegated_.end()) return &it->second;
  return nullptr;
}

namespace {

bool may_mutate(const PolicyRecord& record, const std::string& principal,
                const std::set<std::string>& trusted) {
  if (trusted.count(principal)) return true;
  return record.policy.kind != PolicyKind::Root && record.policy.issuer &&
         *record.policy.issuer == principal;
}

}  // namespace

void PolicyStore::pap_remove(const std::string& principal, const std::string& policy_id) {
  require_registered(principal);
  PolicyRecord* record = find_mutable(policy_id);
  if (!record) {
    log(principal, "denied:remove", policy_id, "not found");
    throw NotFound("no policy " + policy_id);
  }
  if (!may_mutate(*record, principal, trusted_)) {
    log(principal, "denied:remove", policy_id);
    throw Forbidden(principal + " may not remove " + policy_id);
  }
  (record->policy.kind == PolicyKind::Root ? root_ : delegated_).erase(policy_id);
  log(principal, "remove", policy_id);
}

void PolicyStore::pap_enable(const std::string& principal, const std::string& policy_id) {
  require_registered(principal);
  PolicyRecord* record = find_mutable(policy_id);
  if (!record) {
    log(principal, "denied:enable", policy_id, "not found");
    throw NotFound("no policy " + policy_id);
  }
  if (!may_mutate(*record, principal, trusted_)) {
    log(principal, "denied:enable", policy_id);
    throw Forbidden(principal + " may not enable " + policy_id);
  }
  record->enabled = true;
  log(principal, "enable", policy_id);
}

void PolicyStore::pap_disable(const std::string& principal, const std::string& policy_id) {
  require_registered(principal);
  PolicyRecord* record = find_mutable(policy_id);
  if (!record) {
    log(principal, "denied:disable", policy_id, "not found");
    throw NotFound("no policy " + policy_id);
  }
  if (!may_mutate(*record, principal, trusted_)) {
    log(principal, "denied:disable", policy_id);
    throw Forbidden(principal + " may not disable " + policy_id);
  }
  record->enabled = false;
  log(principal, "disable", policy_id);
}

std::vector<const PolicyRecord*> PolicyStore::pap_list(const std::string& principal) const {
  require_registered(principal);
  std::vector<const PolicyRecord*> out;
  for (const auto& [id, record] : root_) out.push_back(&record);
  for (const auto& [id, record] : delegated_) out.push_back(&record);
  return out;
}

void PolicyStore::save_directory(const std::string& dir) const {
  fs::create_directories(fs::path(dir) / "root");
  fs::create_directories(fs::path(dir) / "delegated");
  for (const auto& [id, record] : root_)
    core::write_document_file((fs::path(dir) / "root" / (id + ".json")).string(),
                              record.source.to_document());
  for (const auto& [id, record] : delegated_)
    core::write_document_file((fs::path(dir) / "delegated" / (id + ".json")).string(),
                              record.source.to_document());
  std::ofstream log_out(fs::path(dir) / "changelog.log", std::ios::binary | std::ios::trunc);
  for (const auto& entry : change_log_)
    log_out << core::canonicalize(entry.to_document()) << '\n';
}

PolicyStore PolicyStore::load_directory(const std::string& dir, core::KeyRegistry registry,
                                        std::set<std::string> trusted_authorities,
                                        core::ClockPtr clock) {
  PolicyStore store(std::move(registry), std::move(trusted_authorities), std::move(clock));
  for (const char* compartment : {"root", "delegated"}) {
    const fs::path sub = fs::path(dir) / compartment;
    if (!fs::exists(sub)) continue;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(sub))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      auto envelope = core::SignedDocument::from_document(core::read_document_file(file.string()));
      const AuthzPolicy& loaded = store.load(envelope);
      // Files must sit in the compartment their kind dictates.
      const bool expect_root = std::string(compartment) == "root";
      if ((loaded.kind == PolicyKind::Root) != expect_root)
        throw core::SchemaError("policy " + loaded.id + " stored in wrong compartment");
    }
  }
  const fs::path log_path = fs::path(dir) / "changelog.log";
  if (fs::exists(log_path)) {
    std::ifstream in(log_path, std::ios::binary);
    std::string line;
    std::vector<ChangeLogEntry> history;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      history.push_back(ChangeLogEntry::from_document(core::parse_document(line)));
    }
    // Replay enable/disable so persisted state survives a round trip; the
    // replayed history precedes this process's own entries.
    for (const auto& entry : history) {
      if (auto* record = store.find_mutable(entry.policy_id)) {
        if (entry.operation == "disable") record->enabled = false;
        if (entry.operation == "enable") record->enabled = true;
      }
    }
    history.insert(history.end(), store.change_log_.begin(), store.change_log_.end());
    store.change_log_ = std::move(history);
  }
  return store;
}

}  // namespace fedsec::pdp
