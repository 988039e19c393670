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

#ifndef FEDSEC_GATEWAY_INTERCEPTORS_HPP_
#define FEDSEC_GATEWAY_INTERCEPTORS_HPP_

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "fedsec/core/audit.hpp"
#include "fedsec/gateway/services.hpp"

namespace fedsec::gateway {

/// A step failed; the message is rejected with this failure class. Thrown by
/// interceptors, caught by the chain runner — never escapes process().
struct StepFailure : std::runtime_error {
  StepFailure(std::string failure_class, const std::string& detail)
      : std::runtime_error(failure_class + ": " + detail), failure(std::move(failure_class)) {}
  std::string failure;
};

struct UnmappedAction : std::runtime_error {
  explicit UnmappedAction(const std::string& what) : std::runtime_error(what) {}
};
struct BadInterceptorConfig : std::runtime_error {
  explicit BadInterceptorConfig(const std::string& what) : std::runtime_error(what) {}
};

/// Everything an interceptor may touch while executing one step of a chain.
struct ProcessingContext {
  Message& message;
  Document& state;  // working copy of the current ECP's state variables
  const UtilityClient& utility;
  core::EventSink& sink;
  const std::string& origin;       // gateway instance id, for audit events
  const std::vector<Cep>& ceps;    // bound CEPs, for obligation assertion refs
  std::shared_ptr<const ElementCipher> cipher;
  std::function<void(const std::string& ecp_id)> run_nested;  // apply-policy
};

class Interceptor {
 public:
  virtual ~Interceptor() = default;
  virtual void execute(const Step& step, ProcessingContext& ctx) = 0;
};

/// Maps implementation ids to factories. The IRP names implementations, not
/// actions, so an action can be re-bound without touching the ECP.
class InterceptorRegistry {
 public:
  using Factory = std::function<std::unique_ptr<Interceptor>(const Document& config)>;

  void add(const std::string& impl_id, Factory factory);
  bool contains(const std::string& impl_id) const { return factories_.count(impl_id) != 0; }
  std::set<std::string> impl_ids() const;
  std::unique_ptr<Interceptor> create(const std::string& impl_id, const Document& config) const;

  /// All built-in implementations, ids "builtin.<action>".
  static InterceptorRegistry with_builtins();

 private:
  std::map<std::string, Factory> factories_;
};

/// The assembled chain for one ECP selection: one interceptor per step,
/// in step order. Throws UnmappedAction or BadInterceptorConfig.
std::vector<std::unique_ptr<Interceptor>> assemble_chain(const Ecp& ecp, const Irp& irp,
                                                         const InterceptorRegistry& registry);

/// Guard resolution over (message, state): "header.x", "annotation.y",
/// "state.z", "body.path".
GuardLookup make_guard_lookup(const Message& message, const Document& state);

/// The IRP an ordinary instance uses: every built-in action bound to its
/// built-in implementation.
Irp builtin_irp();

}  // namespace fedsec::gateway

#endif  // FEDSEC_GATEWAY_INTERCEPTORS_HPP_
