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

#include "fedsec/gateway/instance.hpp"

namespace fedsec::gateway {

std::string to_string(InstanceStatus s) {
  switch (s) {
    case InstanceStatus::Created: return "created";
    case InstanceStatus::Active: return "active";
    case InstanceStatus::Inactive: return "inactive";
    case InstanceStatus::Destroyed: return "destroyed";
  }
  return "created";
}

std::string to_string(Outcome o) {
  return o == Outcome::Forwarded ? "forwarded" : "rejected";
}

LifecycleOp lifecycle_op_from_string(const std::string& s) {
  if (s == "load") return LifecycleOp::Load;
  if (s == "activate") return LifecycleOp::Activate;
  if (s == "deactivate") return LifecycleOp::Deactivate;
  if (s == "destroy") return LifecycleOp::Destroy;
  if (s == "rollback") return LifecycleOp::Rollback;
  throw core::SchemaError("unknown lifecycle operation: " + s);
}

Document ProcessResult::to_document() const {
  Document trace_doc = Document::array();
  for (const auto& t : trace) trace_doc.push_back(t);
  return Document{{"failure", failure},
                  {"message", message.to_document()},
                  {"outcome", to_string(outcome)},
                  {"trace", trace_doc}};
}

GatewayInstance::GatewayInstance(std::string id, const ServiceDirectory* directory,
                                 core::EventSinkPtr sink, core::ClockPtr clock, int nesting_cap)
    : id_(std::move(id)), directory_(directory), sink_(std::move(sink)),
      clock_(std::move(clock)), registry_(InterceptorRegistry::with_builtins()),
      cipher_(default_element_cipher()), nesting_cap_(nesting_cap) {
  if (!sink_) sink_ = std::make_shared<core::NullSink>();
}

InstanceStatus GatewayInstance::status() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return status_;
}

std::shared_ptr<const Bundle> GatewayInstance::bundle() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return bundle_;
}

std::size_t GatewayInstance::history_size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return history_.size();
}

std::vector<std::shared_ptr<const Bundle>> GatewayInstance::history() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return history_;
}

InstanceStatus GatewayInstance::lifecycle(LifecycleOp op, const Bundle* new_bundle) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (status_ == InstanceStatus::Destroyed)
    throw IllegalTransition("instance " + id_ + " is destroyed");

  auto note = [&](const std::string& operation) {
    sink_->record(core::EventType::ConfigChanged, id_, "",
                  {{"operation", operation}, {"status", to_string(status_)}});
  };

  switch (op) {
    case LifecycleOp::Load: {
      if (!new_bundle) throw InvalidBundle("load requires a bundle");
      new_bundle->validate(registry_.impl_ids());  // throws before any swap
      auto loaded = std::make_shared<const Bundle>(*new_bundle);
      history_.push_back(loaded);
      bundle_ = std::move(loaded);
      states_.clear();
      for (const auto& [ecp_id, ecp] : bundle_->ecps) states_[ecp_id] = ecp.state_schema;
      if (status_ == InstanceStatus::Created) status_ = InstanceStatus::Inactive;
      note("load");
      return status_;
    }
    case LifecycleOp::Activate:
      if (status_ != InstanceStatus::Inactive)
        throw IllegalTransition("activate from " + to_string(status_));
      status_ = InstanceStatus::Active;
      note("activate");
      return status_;
    case LifecycleOp::Deactivate:
      if (status_ != InstanceStatus::Active)
        throw IllegalTransition("deactivate from " + to_string(status_));
      status_ = InstanceStatus::Inactive;
      note("deactivate");
      return status_;
    case LifecycleOp::Destroy:
      status_ = InstanceStatus::Destroyed;
      bundle_.reset();
      history_.clear();
      states_.clear();
      note("destroy");
      return status_;
    case LifecycleOp::Rollback: {
      if (history_.size() < 2)
        throw IllegalTransition("rollback needs a previous successful configuration");
      history_.pop_back();
      bundle_ = history_.back();
      states_.clear();
      for (const auto& [ecp_id, ecp] : bundle_->ecps) states_[ecp_id] = ecp.state_schema;
      note("rollback");
      return status_;
    }
  }
  return status_;
}

const Ecp& GatewayInstance::select_ecp(const Message& message) const {
  auto bundle = this->bundle();
  if (!bundle) throw NoPolicy("no bundle loaded");
  static const Document no_state = Document::object();
  auto lookup = make_guard_lookup(message, no_state);
  for (const auto& [ecp_id, ecp] : bundle->ecps) {
    if (!ecp.selector || ecp.selector->eval(lookup)) return ecp;
  }
  throw NoPolicy("no enforcement policy matches the message");
}

Cep GatewayInstance::served_cep(const std::string& ecp_id) const {
  auto bundle = this->bundle();
  if (!bundle || !bundle->ecps.count(ecp_id))
    throw NoPolicy("no ecp " + ecp_id + " bound");
  return derive_cep(bundle->ecps.at(ecp_id));
}

void GatewayInstance::install_block_rule(const std::string& subject) {
  std::lock_guard<std::mutex> lock(mutex_);
  blocked_subjects_.insert(subject);
  sink_->record(core::EventType::ConfigChanged, id_, "",
                {{"operation", "block-requester"}, {"subject", subject}});
}

std::map<std::string, Document> GatewayInstance::snapshot_states() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return states_;
}

void GatewayInstance::commit_states(const std::map<std::string, Document>& states) {
  std::lock_guard<std::mutex> lock(mutex_);
  for (const auto& [ecp_id, state] : states) states_[ecp_id] = state;  // last writer wins
}

Document& GatewayInstance::working_state(const Ecp& ecp, Execution& exec) const {
  auto it = exec.states.find(ecp.id);
  if (it == exec.states.end()) it = exec.states.emplace(ecp.id, ecp.state_schema).first;
  return it->second;
}

void GatewayInstance::run_segment(const Ecp& ecp, std::size_t begin, std::size_t end,
                                  Execution& exec) const {
  auto bundle = this->bundle();
  if (!bundle) throw StepFailure("no-bundle", "instance has no configuration");
  UtilityClient utility(bundle->usp, *directory_);
  auto chain = assemble_chain(ecp, bundle->irp, registry_);

  for (std::size_t i = begin; i < end && i < ecp.steps.size(); ++i) {
    const Step& step = ecp.steps[i];
    Document row{{"action", step.action},
                 {"ecp", ecp.id},
                 {"index", static_cast<std::int64_t>(i)},
                 {"status", "ok"}};
    Document& state = working_state(ecp, exec);

    if (step.when && !step.when->eval(make_guard_lookup(exec.message, state))) {
      row["status"] = "skipped";
      exec.trace.push_back(std::move(row));
      continue;
    }

    ProcessingContext ctx{exec.message,
                          state,
                          utility,
                          *sink_,
                          id_,
                          bundle->ceps,
                          cipher_,
                          [&](const std::string& nested_id) {
                            if (exec.depth + 1 > nesting_cap_)
                              throw StepFailure("NestingLimit",
                                                "nested policy depth exceeds " +
                                                    std::to_string(nesting_cap_));
                            auto nested = bundle->ecps.find(nested_id);
                            if (nested == bundle->ecps.end())
                              throw StepFailure("no-policy", "no nested ecp " + nested_id);
                            Execution sub{std::move(exec.message), std::move(exec.states),
                                          std::move(exec.trace), exec.depth + 1};
                            try {
                              run_segment(nested->second, 0, nested->second.steps.size(), sub);
                            } catch (...) {
                              exec.message = std::move(sub.message);
                              exec.states = std::move(sub.states);
                              exec.trace = std::move(sub.trace);
                              throw;
                            }
                            exec.message = std::move(sub.message);
                            exec.states = std::move(sub.states);
                            exec.trace = std::move(sub.trace);
                          }};
    try {
      chain[i]->execute(step, ctx);
      for (const auto& [var, value] : step.set_state) {
        if (!ecp.state_schema.contains(var))
          throw StepFailure("undeclared-state", "step writes undeclared variable " + var);
        Document& target = working_state(ecp, exec);
        if (value.is_object() && value.contains("#incr"))
          target[var] = target.value(var, std::int64_t{0}) + value.at("#incr").get<std::int64_t>();
        else
          target[var] = value;
      }
    } catch (StepFailure& failure) {
      row["status"] = "failed";
      row["reason"] = failure.failure;
      exec.trace.push_back(std::move(row));
      throw;
    } catch (const std::exception& e) {
      row["status"] = "failed";
      row["reason"] = "step-error";
      exec.trace.push_back(std::move(row));
      throw StepFailure("step-error", e.what());
    }
    exec.trace.push_back(std::move(row));
  }
}

ProcessResult GatewayInstance::finish(Execution&& exec, Outcome outcome, std::string failure,
                                      const std::string& ecp_id) {
  commit_states(exec.states);
  sink_->record(core::EventType::MessageProcessed, id_,
                exec.message.header("context-reference"),
                {{"correlation", exec.message.correlation_id()},
                 {"ecp", ecp_id},
                 {"failure", failure},
                 {"outcome", to_string(outcome)}});
  ProcessResult result;
  result.outcome = outcome;
  result.failure = std::move(failure);
  result.message = std::move(exec.message);
  result.trace = std::move(exec.trace);
  return result;
}

ProcessResult GatewayInstance::process(Message message) {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (status_ != InstanceStatus::Active) {
      sink_->record(core::EventType::MessageProcessed, id_,
                    message.header("context-reference"),
                    {{"correlation", message.correlation_id()},
                     {"failure", "InstanceInactive"},
                     {"outcome", "rejected"}});
      ProcessResult result;
      result.outcome = Outcome::Rejected;
      result.failure = "InstanceInactive";
      result.message = std::move(message);
      return result;
    }
    if (message.has_header("subject") && blocked_subjects_.count(message.header("subject"))) {
      sink_->record(core::EventType::MessageProcessed, id_,
                    message.header("context-reference"),
                    {{"correlation", message.correlation_id()},
                     {"failure", "requester-blocked"},
                     {"outcome", "rejected"},
                     {"subject", message.header("subject")}});
      ProcessResult result;
      result.outcome = Outcome::Rejected;
      result.failure = "requester-blocked";
      result.message = std::move(message);
      return result;
    }
  }

  Execution exec{std::move(message), snapshot_states(), {}, 0};

  const Ecp* selected = nullptr;
  try {
    // detect ambiguous selection for the audit trail
    auto bundle = this->bundle();
    if (!bundle) throw NoPolicy("no bundle loaded");
    static const Document no_state = Document::object();
    auto lookup = make_guard_lookup(exec.message, no_state);
    std::vector<const Ecp*> matching;
    for (const auto& [ecp_id, ecp] : bundle->ecps)
      if (!ecp.selector || ecp.selector->eval(lookup)) matching.push_back(&ecp);
    if (matching.empty()) throw NoPolicy("no enforcement policy matches the message");
    if (matching.size() > 1)
      sink_->record(core::EventType::MessageProcessed, id_,
                    exec.message.header("context-reference"),
                    {{"correlation", exec.message.correlation_id()},
                     {"note", "ambiguous-ecp-selection"},
                     {"selected", matching.front()->id}});
    selected = matching.front();  // stable id order
  } catch (const NoPolicy&) {
    return finish(std::move(exec), Outcome::Rejected, "NoPolicy", "");
  }

  try {
    run_segment(*selected, 0, selected->steps.size(), exec);
  } catch (const StepFailure& failure) {
    return finish(std::move(exec), Outcome::Rejected, failure.failure, selected->id);
  } catch (const UnmappedAction&) {
    return finish(std::move(exec), Outcome::Rejected, "UnmappedAction", selected->id);
  } catch (const BadInterceptorConfig&) {
    return finish(std::move(exec), Outcome::Rejected, "BadInterceptorConfig", selected->id);
  }
  return finish(std::move(exec), Outcome::Forwarded, "", selected->id);
}

}  // namespace fedsec::gateway
