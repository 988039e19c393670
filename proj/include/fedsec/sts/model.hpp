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

#ifndef FEDSEC_STS_MODEL_HPP_
#define FEDSEC_STS_MODEL_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fedsec/core/attribute.hpp"
#include "fedsec/core/document.hpp"
#include "fedsec/core/keys.hpp"
#include "fedsec/core/signed_document.hpp"
#include "fedsec/pdp/model.hpp"

namespace fedsec::sts {

using core::Document;

struct Claim {
  std::string name;
  core::Value value;
  std::string authority;

  Document to_document() const;
  static Claim from_document(const Document& doc);
  bool operator==(const Claim&) const = default;
};

/// internal attribute -> external claim. Internal attributes without a rule
/// never leave the broker (privacy default). A rule is a function: one
/// internal id maps to exactly one external name.
struct ClaimsTransformationRule {
  std::string internal_id;
  std::string external_name;
  std::map<std::string, std::string> value_map;  // empty: pass value through
  bool keep = true;                              // false: explicit drop

  Document to_document() const;
  static ClaimsTransformationRule from_document(const Document& doc);
};

/// Validity rule for claims presented to this broker in a context:
/// require makes the claim mandatory; a non-empty allowed set restricts
/// values (string form).
struct ClaimValidityRule {
  std::string claim;
  bool require = false;
  std::set<std::string> allowed;

  Document to_document() const;
  static ClaimValidityRule from_document(const Document& doc);
};

/// Directed trust edge: this broker recognises tokens issued by the partner.
/// Absence of a partner entry means tokens from that issuer are invalid here.
struct PartnerDescriptor {
  std::string broker_id;
  core::Bytes verification_key;
  std::set<std::string> disclose;  // empty: no disclosure restriction

  Document to_document() const;
  static PartnerDescriptor from_document(const Document& doc);
};

enum class AuthScheme { SharedSecret, SignatureChallenge };

std::string to_string(AuthScheme s);
AuthScheme auth_scheme_from_string(const std::string& s);

struct InternalIdentity {
  std::string subject;
  std::string secret;             // shared-secret scheme
  core::Bytes verification_key;   // signature-challenge scheme
  std::map<std::string, core::Value> attributes;

  Document to_document() const;
  static InternalIdentity from_document(const Document& doc);
};

/// Maps a token request or management operation to a federation context.
/// All listed fields must equal the request metadata; selectors within one
/// broker must be mutually exclusive.
struct FederationSelector {
  std::map<std::string, std::string> fields;  // requester/target-service/context-reference/token-type

  bool matches(const std::map<std::string, std::string>& metadata) const;
  /// Two equality selectors overlap unless they disagree on a shared field.
  bool overlaps(const FederationSelector& other) const;

  Document to_document() const;
  static FederationSelector from_document(const Document& doc);
};

/// One circle-of-trust configuration inside a broker.
struct FederationContext {
  std::string federation_id;
  bool enabled = true;
  FederationSelector selector;
  std::map<std::string, PartnerDescriptor> partners;

  AuthScheme auth_scheme = AuthScheme::SharedSecret;
  std::map<std::string, InternalIdentity> identities;
  std::vector<ClaimsTransformationRule> transform_rules;
  std::vector<ClaimValidityRule> validity_rules;
  std::int64_t token_lifetime = 3600;
  bool allow_empty_claims = false;
  std::vector<pdp::Obligation> obligations;
  std::vector<std::string> process;  // pipeline stage names; empty = default

  Document to_document() const;
  static FederationContext from_document(const Document& doc);
};

struct SecurityToken {
  std::string token_id;
  std::string issuer;
  std::string subject;
  std::vector<Claim> claims;
  std::string federation_id;
  std::int64_t not_before = 0;
  std::int64_t not_after = 0;
  core::Bytes proof_key;  // public half of the proof-of-possession keypair

  Document body_document() const;
  static SecurityToken parse_body(const Document& body);
};

enum class TokenRequestKind { Issue, Validate, Exchange };

struct TokenRequest {
  TokenRequestKind kind = TokenRequestKind::Issue;
  std::string requester;  // subject id
  Document credential;    // scheme-tagged, e.g. {"scheme":"shared-secret","secret":...}
  std::map<std::string, std::string> metadata;  // selector fields + target-partner
  std::optional<core::SignedDocument> token;    // validate/exchange
  std::set<std::string> claims_hint;            // issue: restrict emitted claims
};

// Fault types: configuration and issue paths throw; validation never does.
struct FederationNotFound : std::runtime_error {
  explicit FederationNotFound(const std::string& what) : std::runtime_error(what) {}
};
struct AmbiguousSelector : std::runtime_error {
  explicit AmbiguousSelector(const std::string& what) : std::runtime_error(what) {}
};
struct AuthenticationFailed : std::runtime_error {
  explicit AuthenticationFailed(const std::string& what) : std::runtime_error(what) {}
};
struct UnknownSubject : std::runtime_error {
  explicit UnknownSubject(const std::string& what) : std::runtime_error(what) {}
};
struct NoClaimsAvailable : std::runtime_error {
  explicit NoClaimsAvailable(const std::string& what) : std::runtime_error(what) {}
};
struct SourceInvalid : std::runtime_error {
  explicit SourceInvalid(const std::string& what) : std::runtime_error(what) {}
};
struct ManagementForbidden : std::runtime_error {
  explicit ManagementForbidden(const std::string& what) : std::runtime_error(what) {}
};
struct UnknownProvider : std::runtime_error {
  explicit UnknownProvider(const std::string& what) : std::runtime_error(what) {}
};
struct InvalidSpec : std::runtime_error {
  explicit InvalidSpec(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fedsec::sts

#endif  // FEDSEC_STS_MODEL_HPP_
