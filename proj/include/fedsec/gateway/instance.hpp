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

#ifndef FEDSEC_GATEWAY_INSTANCE_HPP_
#define FEDSEC_GATEWAY_INSTANCE_HPP_

#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "fedsec/core/audit.hpp"
#include "fedsec/core/clock.hpp"
#include "fedsec/gateway/interceptors.hpp"

namespace fedsec::gateway {

enum class InstanceStatus { Created, Active, Inactive, Destroyed };
enum class LifecycleOp { Load, Activate, Deactivate, Destroy, Rollback };
enum class Outcome { Forwarded, Rejected };

std::string to_string(InstanceStatus s);
std::string to_string(Outcome o);
LifecycleOp lifecycle_op_from_string(const std::string& s);

struct IllegalTransition : std::runtime_error {
  explicit IllegalTransition(const std::string& what) : std::runtime_error(what) {}
};

struct NoPolicy : std::runtime_error {
  explicit NoPolicy(const std::string& what) : std::runtime_error(what) {}
};

struct ProcessResult {
  Outcome outcome = Outcome::Rejected;
  std::string failure;  // failure class when rejected
  Message message;      // the (possibly transformed) message
  std::vector<Document> trace;

  bool forwarded() const { return outcome == Outcome::Forwarded; }
  Document to_document() const;
};

/// A policy enforcement point instance: a bound ECP/IRP/USP/CEP bundle, a
/// lifecycle with rollback, per-ECP enforcement state and fail-closed message
/// processing.
///
/// Concurrency: messages process against a bundle snapshot and a state
/// snapshot; state commits are serialized (last writer wins per declared
/// variable). Lifecycle transitions swap the bundle under the same lock, so
/// in-flight messages finish on the bundle they started with.
class GatewayInstance {
 public:
  GatewayInstance(std::string id, const ServiceDirectory* directory, core::EventSinkPtr sink,
                  core::ClockPtr clock, int nesting_cap = 4);

  const std::string& id() const { return id_; }
  InstanceStatus status() const;
  std::shared_ptr<const Bundle> bundle() const;
  std::size_t history_size() const;
  std::vector<std::shared_ptr<const Bundle>> history() const;

  /// created -> load -> activate <-> deactivate -> destroy; rollback needs
  /// two successful loads. Load validates the bundle atomically: on
  /// InvalidBundle the previous configuration keeps serving. Every
  /// transition emits a config-changed event.
  InstanceStatus lifecycle(LifecycleOp op, const Bundle* new_bundle = nullptr);

  /// Full pipeline for one message: select ECP, assemble the chain, run the
  /// steps. Every failure class rejects; nothing is ever silently forwarded.
  ProcessResult process(Message message);

  /// First ECP in stable id order whose selection predicate matches.
  /// Throws NoPolicy (fail-closed).
  const Ecp& select_ecp(const Message& message) const;

  /// The published requirements for one of the bound ECPs.
  Cep served_cep(const std::string& ecp_id) const;

  /// Adaptation hook: reject further messages whose subject header matches.
  void install_block_rule(const std::string& subject);

  const InterceptorRegistry& registry() const { return registry_; }
  core::EventSinkPtr sink() const { return sink_; }

  // Segment execution, shared with the aggregation composites.
  struct Execution {
    Message message;
    std::map<std::string, Document> states;  // ecp id -> working state
    std::vector<Document> trace;
    int depth = 0;
  };
  /// Runs steps [begin, end) of the ECP against the carried execution
  /// context. Throws StepFailure; assembly errors propagate.
  void run_segment(const Ecp& ecp, std::size_t begin, std::size_t end, Execution& exec) const;
  std::map<std::string, Document> snapshot_states() const;
  void commit_states(const std::map<std::string, Document>& states);

 private:
  Document& working_state(const Ecp& ecp, Execution& exec) const;
  ProcessResult finish(Execution&& exec, Outcome outcome, std::string failure,
                       const std::string& ecp_id);

  std::string id_;
  const ServiceDirectory* directory_;
  core::EventSinkPtr sink_;
  core::ClockPtr clock_;
  InterceptorRegistry registry_;
  std::shared_ptr<const ElementCipher> cipher_;
  int nesting_cap_;

  mutable std::mutex mutex_;
  InstanceStatus status_ = InstanceStatus::Created;
  std::shared_ptr<const Bundle> bundle_;
  std::vector<std::shared_ptr<const Bundle>> history_;
  std::map<std::string, Document> states_;  // committed enforcement state
  std::set<std::string> blocked_subjects_;
};

}  // namespace fedsec::gateway

#endif  // FEDSEC_GATEWAY_INSTANCE_HPP_
