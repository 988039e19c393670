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

#include "fedsec/core/audit.hpp"

#include "fedsec/core/errors.hpp"

namespace fedsec::core {

std::string to_string(EventType t) {
  switch (t) {
    case EventType::MessageProcessed: return "message-processed";
    case EventType::TokenIssued: return "token-issued";
    case EventType::TokenValidated: return "token-validated";
    case EventType::TokenRejected: return "token-rejected";
    case EventType::AuthzDecision: return "authz-decision";
    case EventType::InvalidClaims: return "invalid-claims";
    case EventType::ConfigChanged: return "config-changed";
    case EventType::AdaptationFired: return "adaptation-fired";
  }
  return "message-processed";
}

EventType event_type_from_string(const std::string& s) {
  if (s == "message-processed") return EventType::MessageProcessed;
  if (s == "token-issued") return EventType::TokenIssued;
  if (s == "token-validated") return EventType::TokenValidated;
  if (s == "token-rejected") return EventType::TokenRejected;
  if (s == "authz-decision") return EventType::AuthzDecision;
  if (s == "invalid-claims") return EventType::InvalidClaims;
  if (s == "config-changed") return EventType::ConfigChanged;
  if (s == "adaptation-fired") return EventType::AdaptationFired;
  throw SchemaError("unknown event type: " + s);
}

Document AuditEvent::to_document() const {
  Document pl = Document::object();
  for (const auto& [k, v] : payload) pl[k] = v;
  return Document{{"context", context_id}, {"origin", origin},   {"payload", pl},
                  {"seq", seq},            {"type", to_string(type)}, {"wall", wall}};
}

AuditEvent AuditEvent::from_document(const Document& doc) {
  AuditEvent ev;
  ev.type = event_type_from_string(doc.at("type").get<std::string>());
  ev.seq = doc.at("seq").get<std::int64_t>();
  ev.wall = doc.at("wall").get<std::int64_t>();
  ev.origin = doc.at("origin").get<std::string>();
  ev.context_id = doc.at("context").get<std::string>();
  if (doc.contains("payload"))
    for (auto it = doc.at("payload").begin(); it != doc.at("payload").end(); ++it)
      ev.payload[it.key()] = it.value().get<std::string>();
  return ev;
}

void EventLog::record(EventType type, const std::string& origin, const std::string& context_id,
                      std::map<std::string, std::string> payload) {
  std::lock_guard<std::mutex> lock(mutex_);
  AuditEvent ev;
  ev.type = type;
  ev.seq = next_seq_[origin]++;
  ev.wall = clock_->now_unix();
  ev.origin = origin;
  ev.context_id = context_id;
  ev.payload = std::move(payload);
  events_.push_back(std::move(ev));
}

std::vector<AuditEvent> EventLog::events() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return events_;
}

std::size_t EventLog::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return events_.size();
}

void EventLog::write_lines(std::ostream& out) const {
  for (const auto& ev : events())
    out << canonicalize(ev.to_document()) << '\n';
}

}  // namespace fedsec::core
