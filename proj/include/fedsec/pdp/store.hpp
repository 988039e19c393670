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

#ifndef FEDSEC_PDP_STORE_HPP_
#define FEDSEC_PDP_STORE_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fedsec/core/audit.hpp"
#include "fedsec/core/clock.hpp"
#include "fedsec/core/keys.hpp"
#include "fedsec/core/signed_document.hpp"
#include "fedsec/pdp/model.hpp"

namespace fedsec::pdp {

struct BadSignature : std::runtime_error {
  explicit BadSignature(const std::string& what) : std::runtime_error(what) {}
};
struct UntrustedRootSigner : std::runtime_error {
  explicit UntrustedRootSigner(const std::string& what) : std::runtime_error(what) {}
};
struct DuplicatePolicyId : std::runtime_error {
  explicit DuplicatePolicyId(const std::string& what) : std::runtime_error(what) {}
};
struct Forbidden : std::runtime_error {
  explicit Forbidden(const std::string& what) : std::runtime_error(what) {}
};
struct NotFound : std::runtime_error {
  explicit NotFound(const std::string& what) : std::runtime_error(what) {}
};

/// A loaded policy together with its store metadata. Expired policies stay
/// in the store with their history; they just stop affecting decisions.
struct PolicyRecord {
  AuthzPolicy policy;
  core::SignedDocument source;
  bool enabled = true;
  std::int64_t loaded_at = 0;
};

struct ChangeLogEntry {
  std::int64_t wall = 0;
  std::string principal;
  std::string operation;  // add/remove/enable/disable, or denied:<op>
  std::string policy_id;
  std::string note;

  Document to_document() const;
  static ChangeLogEntry from_document(const Document& doc);
};

enum class PapOp { Add, Remove, Enable, Disable, List };

std::string to_string(PapOp op);
PapOp pap_op_from_string(const std::string& s);

/// Compartmented policy store behind the policy administration point.
///
/// Root policies live in one compartment, delegated and administrative
/// policies in another; the kinds never mix. Every mutation — and every
/// denied attempt — lands in the append-only change log.
class PolicyStore {
 public:
  PolicyStore(core::KeyRegistry registry, std::set<std::string> trusted_authorities,
              core::ClockPtr clock);

  /// Validates and indexes a signed policy document: signature verified
  /// against the registry; root policies must be signed by a trusted
  /// authority and carry no issuer; delegated/administrative policies get
  /// issuer := signer. Rejection leaves the store unchanged.
  /// Throws BadSignature, UntrustedRootSigner, DuplicatePolicyId,
  /// core::SchemaError.
  const AuthzPolicy& load(const core::SignedDocument& doc);

  /// PAP surface. Root-compartment mutations need a trusted authority;
  /// delegated-compartment mutations need a trusted authority or the
  /// policy's own issuer. List is read-only and open to every registered
  /// principal. Throws Forbidden, NotFound, and the load errors for Add.
  const AuthzPolicy& pap_add(const std::string& principal, const core::SignedDocument& doc);
  void pap_remove(const std::string& principal, const std::string& policy_id);
  void pap_enable(const std::string& principal, const std::string& policy_id);
  void pap_disable(const std::string& principal, const std::string& policy_id);
  std::vector<const PolicyRecord*> pap_list(const std::string& principal) const;

  const PolicyRecord* find(const std::string& policy_id) const;
  const std::map<std::string, PolicyRecord>& root_compartment() const { return root_; }
  const std::map<std::string, PolicyRecord>& delegated_compartment() const { return delegated_; }
  const std::set<std::string>& trusted_authorities() const { return trusted_; }
  const core::KeyRegistry& registry() const { return registry_; }
  const std::vector<ChangeLogEntry>& change_log() const { return change_log_; }
  const core::Clock& clock() const { return *clock_; }

  /// Directory layout: root/, delegated/, changelog.log (one canonical
  /// record per line). Enabled/disabled state is reconstructed by replaying
  /// the changelog.
  void save_directory(const std::string& dir) const;
  static PolicyStore load_directory(const std::string& dir, core::KeyRegistry registry,
                                    std::set<std::string> trusted_authorities,
                                    core::ClockPtr clock);

 private:
  const AuthzPolicy& index(const core::SignedDocument& doc, const std::string& principal);
  void log(const std::string& principal, const std::string& operation,
           const std::string& policy_id, const std::string& note = "");
  PolicyRecord* find_mutable(const std::string& policy_id);
  void require_registered(const std::string& principal) const;
  bool is_trusted(const std::string& principal) const { return trusted_.count(principal) != 0; }

  core::KeyRegistry registry_;
  std::set<std::string> trusted_;
  core::ClockPtr clock_;
  std::map<std::string, PolicyRecord> root_;
  std::map<std::string, PolicyRecord> delegated_;
  std::vector<ChangeLogEntry> change_log_;
};

}  // namespace fedsec::pdp

#endif  // FEDSEC_PDP_STORE_HPP_
