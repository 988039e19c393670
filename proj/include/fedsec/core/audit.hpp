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

#ifndef FEDSEC_CORE_AUDIT_HPP_
#define FEDSEC_CORE_AUDIT_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <vector>

#include "fedsec/core/clock.hpp"
#include "fedsec/core/document.hpp"

namespace fedsec::core {

enum class EventType {
  MessageProcessed,
  TokenIssued,
  TokenValidated,
  TokenRejected,
  AuthzDecision,
  InvalidClaims,
  ConfigChanged,
  AdaptationFired,
};

std::string to_string(EventType t);
EventType event_type_from_string(const std::string& s);  // throws SchemaError

struct AuditEvent {
  EventType type = EventType::MessageProcessed;
  std::int64_t seq = 0;   // monotonic per origin
  std::int64_t wall = 0;  // unix seconds
  std::string origin;     // emitting component id
  std::string context_id;
  std::map<std::string, std::string> payload;

  Document to_document() const;
  static AuditEvent from_document(const Document& doc);
};

class EventSink {
 public:
  virtual ~EventSink() = default;
  virtual void record(EventType type, const std::string& origin, const std::string& context_id,
                      std::map<std::string, std::string> payload) = 0;
};

/// Append-only in-memory event stream. Assigns per-origin sequence numbers and
/// wall time from the injected clock. Thread-safe.
class EventLog final : public EventSink {
 public:
  explicit EventLog(ClockPtr clock) : clock_(std::move(clock)) {}

  void record(EventType type, const std::string& origin, const std::string& context_id,
              std::map<std::string, std::string> payload) override;

  std::vector<AuditEvent> events() const;
  std::size_t size() const;
  /// One canonical record per line.
  void write_lines(std::ostream& out) const;

 private:
  ClockPtr clock_;
  mutable std::mutex mutex_;
  std::vector<AuditEvent> events_;
  std::map<std::string, std::int64_t> next_seq_;
};

/// Sink that drops everything; default where callers do not care.
class NullSink final : public EventSink {
 public:
  void record(EventType, const std::string&, const std::string&,
              std::map<std::string, std::string>) override {}
};

using EventSinkPtr = std::shared_ptr<EventSink>;

}  // namespace fedsec::core

#endif  // FEDSEC_CORE_AUDIT_HPP_
