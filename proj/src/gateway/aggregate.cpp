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

#include "fedsec/gateway/aggregate.hpp"

namespace fedsec::gateway {

namespace {

std::string bundle_fingerprint(const GatewayInstance& node) {
  auto bundle = node.bundle();
  if (!bundle) throw InvalidBundle("aggregation node " + node.id() + " has no bundle");
  return core::canonicalize(bundle->to_document());
}

ProcessResult reject_result(Message message, std::string failure,
                            std::vector<Document> trace = {}) {
  ProcessResult result;
  result.outcome = Outcome::Rejected;
  result.failure = std::move(failure);
  result.message = std::move(message);
  result.trace = std::move(trace);
  return result;
}

}  // namespace

InlineComposite::InlineComposite(std::vector<GatewayInstance*> nodes,
                                 std::vector<Segment> partition)
    : nodes_(std::move(nodes)), partition_(std::move(partition)) {
  if (nodes_.empty()) throw InvalidBundle("in-line aggregation needs at least one node");
  const std::string reference = bundle_fingerprint(*nodes_.front());
  for (const auto* node : nodes_)
    if (bundle_fingerprint(*node) != reference)
      throw InvalidBundle("in-line nodes must share one bundle");

  // order-preserving, exactly-once coverage of every bound ECP
  std::size_t cursor = 0;
  for (const auto& segment : partition_) {
    if (segment.node >= nodes_.size())
      throw PartitionGap("segment names node " + std::to_string(segment.node) +
                         " outside the line");
    if (segment.begin < cursor)
      throw PartitionOverlap("steps " + std::to_string(segment.begin) + ".." +
                             std::to_string(cursor - 1) + " assigned twice");
    if (segment.begin > cursor)
      throw PartitionGap("steps " + std::to_string(cursor) + ".." +
                         std::to_string(segment.begin - 1) + " unassigned");
    if (segment.end <= segment.begin) throw PartitionGap("empty segment");
    cursor = segment.end;
  }
  for (const auto& [ecp_id, ecp] : nodes_.front()->bundle()->ecps)
    if (ecp.steps.size() != cursor)
      throw PartitionGap("partition covers " + std::to_string(cursor) + " steps but ecp " +
                         ecp_id + " has " + std::to_string(ecp.steps.size()));
}

ProcessResult InlineComposite::process(Message message) {
  const Ecp* selected = nullptr;
  try {
    selected = &nodes_.front()->select_ecp(message);
  } catch (const NoPolicy&) {
    return reject_result(std::move(message), "NoPolicy");
  }

  GatewayInstance::Execution exec{std::move(message), nodes_.front()->snapshot_states(), {}, 0};
  for (const auto& segment : partition_) {
    try {
      nodes_[segment.node]->run_segment(*selected, segment.begin, segment.end, exec);
    } catch (const StepFailure& failure) {
      for (auto* node : nodes_) node->commit_states(exec.states);
      return reject_result(std::move(exec.message), failure.failure, std::move(exec.trace));
    }
  }
  for (auto* node : nodes_) node->commit_states(exec.states);

  ProcessResult result;
  result.outcome = Outcome::Forwarded;
  result.message = std::move(exec.message);
  result.trace = std::move(exec.trace);
  return result;
}

Assignment assignment_from_string(const std::string& s) {
  if (s == "round-robin") return Assignment::RoundRobin;
  if (s == "least-loaded") return Assignment::LeastLoaded;
  if (s == "affinity-by-action") return Assignment::AffinityByAction;
  throw core::SchemaError("unknown assignment policy: " + s);
}

ClusterComposite::ClusterComposite(GatewayInstance* master,
                                   std::vector<GatewayInstance*> workers, Assignment assignment)
    : master_(master), workers_(std::move(workers)),
      available_(workers_.size(), true), executed_(workers_.size(), 0),
      assignment_(assignment) {
  if (!master_ || workers_.empty())
    throw InvalidBundle("cluster aggregation needs a master and at least one worker");
  const std::string reference = bundle_fingerprint(*master_);
  for (const auto* worker : workers_)
    if (bundle_fingerprint(*worker) != reference)
      throw InvalidBundle("cluster workers must share the master's bundle");
}

void ClusterComposite::set_worker_available(std::size_t index, bool available) {
  if (index < available_.size()) available_[index] = available;
}

GatewayInstance* ClusterComposite::pick_worker(const std::string& action) {
  const std::size_t n = workers_.size();
  auto usable = [&](std::size_t i) { return available_[i]; };

  switch (assignment_) {
    case Assignment::RoundRobin: {
      for (std::size_t probe = 0; probe < n; ++probe) {
        const std::size_t i = (round_robin_next_ + probe) % n;
        if (usable(i)) {
          round_robin_next_ = (i + 1) % n;
          ++executed_[i];
          return workers_[i];
        }
      }
      return nullptr;
    }
    case Assignment::LeastLoaded: {
      std::size_t best = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (!usable(i)) continue;
        if (best == n || executed_[i] < executed_[best]) best = i;
      }
      if (best == n) return nullptr;
      ++executed_[best];
      return workers_[best];
    }
    case Assignment::AffinityByAction: {
      auto it = affinity_.find(action);
      if (it != affinity_.end() && usable(it->second)) {
        ++executed_[it->second];
        return workers_[it->second];
      }
      // (re)assign the action to the next available worker
      for (std::size_t probe = 0; probe < n; ++probe) {
        const std::size_t i = (round_robin_next_ + probe) % n;
        if (usable(i)) {
          round_robin_next_ = (i + 1) % n;
          affinity_[action] = i;
          ++executed_[i];
          return workers_[i];
        }
      }
      return nullptr;
    }
  }
  return nullptr;
}

ProcessResult ClusterComposite::process(Message message) {
  const Ecp* selected = nullptr;
  try {
    selected = &master_->select_ecp(message);
  } catch (const NoPolicy&) {
    return reject_result(std::move(message), "NoPolicy");
  }

  GatewayInstance::Execution exec{std::move(message), master_->snapshot_states(), {}, 0};
  for (std::size_t i = 0; i < selected->steps.size(); ++i) {
    GatewayInstance* worker = pick_worker(selected->steps[i].action);
    if (!worker) {
      master_->commit_states(exec.states);
      return reject_result(std::move(exec.message), "ClusterExhausted", std::move(exec.trace));
    }
    try {
      worker->run_segment(*selected, i, i + 1, exec);
    } catch (const StepFailure& failure) {
      master_->commit_states(exec.states);
      return reject_result(std::move(exec.message), failure.failure, std::move(exec.trace));
    }
  }
  master_->commit_states(exec.states);

  ProcessResult result;
  result.outcome = Outcome::Forwarded;
  result.message = std::move(exec.message);
  result.trace = std::move(exec.trace);
  return result;
}

}  // namespace fedsec::gateway
