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

#ifndef FEDSEC_GATEWAY_AGGREGATE_HPP_
#define FEDSEC_GATEWAY_AGGREGATE_HPP_

#include <vector>

#include "fedsec/gateway/instance.hpp"

namespace fedsec::gateway {

struct PartitionGap : std::runtime_error {
  explicit PartitionGap(const std::string& what) : std::runtime_error(what) {}
};
struct PartitionOverlap : std::runtime_error {
  explicit PartitionOverlap(const std::string& what) : std::runtime_error(what) {}
};

/// In-line aggregation: each node in the line resolves one contiguous part of
/// the enforcement policy. Processing a message through the line produces the
/// same outcome as a single node running the whole ECP; the working message,
/// annotations and state travel between nodes, and the final state is
/// replicated to every node.
class InlineComposite {
 public:
  struct Segment {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t node = 0;  // index into nodes
  };

  /// Validates at configuration time that the partition covers every bound
  /// ECP's steps exactly once, in order. Throws PartitionGap or
  /// PartitionOverlap; nodes must share one bundle.
  InlineComposite(std::vector<GatewayInstance*> nodes, std::vector<Segment> partition);

  ProcessResult process(Message message);

 private:
  std::vector<GatewayInstance*> nodes_;
  std::vector<Segment> partition_;
};

enum class Assignment { RoundRobin, LeastLoaded, AffinityByAction };

Assignment assignment_from_string(const std::string& s);

/// Clustered aggregation: a master assigns each enforcement step to a worker
/// and keeps the authoritative enforcement state and the node bookkeeping.
/// Unavailable workers are skipped; a step with no available worker rejects
/// the message with ClusterExhausted.
class ClusterComposite {
 public:
  /// Workers must share the master's bundle (checked canonically).
  ClusterComposite(GatewayInstance* master, std::vector<GatewayInstance*> workers,
                   Assignment assignment);

  void set_worker_available(std::size_t index, bool available);
  ProcessResult process(Message message);

 private:
  GatewayInstance* pick_worker(const std::string& action);

  GatewayInstance* master_;
  std::vector<GatewayInstance*> workers_;
  std::vector<bool> available_;
  std::vector<std::size_t> executed_;  // per-worker step count (load signal)
  Assignment assignment_;
  std::size_t round_robin_next_ = 0;
  std::map<std::string, std::size_t> affinity_;
};

}  // namespace fedsec::gateway

#endif  // FEDSEC_GATEWAY_AGGREGATE_HPP_
