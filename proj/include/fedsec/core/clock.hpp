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

#ifndef FEDSEC_CORE_CLOCK_HPP_
#define FEDSEC_CORE_CLOCK_HPP_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>

namespace fedsec::core {

/// Wall clock injected everywhere a validity window or event timestamp is
/// read, so tests can freeze time.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_unix() const = 0;
};

class SystemClock final : public Clock {
 public:
  std::int64_t now_unix() const override {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  }
};

class FixedClock final : public Clock {
 public:
  explicit FixedClock(std::int64_t t) : now_(t) {}
  std::int64_t now_unix() const override { return now_.load(); }
  void set(std::int64_t t) { now_.store(t); }
  void advance(std::int64_t seconds) { now_.fetch_add(seconds); }

 private:
  std::atomic<std::int64_t> now_;
};

using ClockPtr = std::shared_ptr<const Clock>;

inline ClockPtr system_clock() { return std::make_shared<SystemClock>(); }

}  // namespace fedsec::core

#endif  // FEDSEC_CORE_CLOCK_HPP_
