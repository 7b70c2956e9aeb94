/*
 * Copyright 2026 The hbmsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * @file sim_core.hpp
 * @brief Deterministic discrete-event engine with integer picosecond time.
 *
 * Events are dequeued in (fire_at, sequence) order. The sequence number is
 * handed out at scheduling time, so two events at the same instant fire in
 * the order they were scheduled. Every model in the simulator schedules its
 * work through one Engine instance; an Engine is not thread-safe.
 */
#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hbmsim {

/// Raised on simulator bugs: scheduling into the past, livelock, bad tags.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised on invalid user configuration (profiles, bindings, workloads).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Simulated time as an unsigned picosecond count.
class SimTime {
 public:
  constexpr SimTime() = default;
  constexpr explicit SimTime(std::uint64_t picoseconds) : ps_(picoseconds) {}

  static constexpr SimTime from_ps(std::uint64_t ps) { return SimTime(ps); }
  /// Rounds to the nearest picosecond; negative inputs clamp to zero.
  static SimTime from_ns(double ns);
  /// Time to move `bytes` at `bytes_per_second`, rounded up to whole ps.
  static SimTime transfer(double bytes, double bytes_per_second);

  constexpr std::uint64_t ps() const { return ps_; }
  constexpr double ns() const { return static_cast<double>(ps_) / 1e3; }
  constexpr double seconds() const { return static_cast<double>(ps_) / 1e12; }

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime operator+(SimTime o) const { return SimTime(ps_ + o.ps_); }
  constexpr SimTime& operator+=(SimTime o) {
    ps_ += o.ps_;
    return *this;
  }
  /// Saturating difference.
  constexpr SimTime operator-(SimTime o) const {
    return SimTime(ps_ > o.ps_ ? ps_ - o.ps_ : 0);
  }
  constexpr SimTime operator*(std::uint64_t k) const { return SimTime(ps_ * k); }

 private:
  std::uint64_t ps_ = 0;
};

constexpr SimTime max(SimTime a, SimTime b) { return a < b ? b : a; }
constexpr SimTime min(SimTime a, SimTime b) { return a < b ? a : b; }

/// A clock with an integer-picosecond period anchored at phase_origin.
class ClockDomain {
 public:
  ClockDomain() = default;
  ClockDomain(std::string name, double frequency_hz, SimTime phase_origin = SimTime{});

  const std::string& name() const { return name_; }
  double frequency() const { return frequency_; }
  SimTime period() const { return period_; }
  SimTime phase_origin() const { return origin_; }

  /// Smallest edge time that is >= t.
  SimTime next_edge(SimTime t) const;
  /// Duration of `cycles` periods.
  SimTime cycles(std::uint64_t n) const { return period_ * n; }

 private:
  std::string name_;
  double frequency_ = 0.0;
  SimTime period_{1};
  SimTime origin_{};
};

/// Free-function form used by tests and the python binding.
SimTime next_edge(const ClockDomain& domain, SimTime t);

using EventId = std::uint64_t;

class Engine {
 public:
  using Action = std::function<void()>;

  static constexpr std::uint64_t kDefaultEventBudget = 1'000'000'000ULL;

  Engine() = default;
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  /// Enqueue `action` to fire at `at`. Throws SimulationError if at < now().
  EventId schedule(SimTime at, Action action);
  /// Convenience: fire `delay` after now().
  EventId schedule_in(SimTime delay, Action action) { return schedule(now_ + delay, std::move(action)); }

  /// Fire every event with fire_at <= limit. Returns the number fired.
  std::uint64_t run_until(SimTime limit);
  /// Drain the queue.
  std::uint64_t run();

  SimTime now() const { return now_; }
  bool empty() const { return queue_.empty(); }
  std::size_t pending() const { return queue_.size(); }
  std::uint64_t events_fired() const { return fired_; }

  void set_event_budget(std::uint64_t budget) { budget_ = budget; }
  std::uint64_t event_budget() const { return budget_; }

  /// FNV-1a digest over the (fire_at, sequence) pairs of every fired event.
  std::uint64_t trace_hash() const { return trace_hash_; }

 private:
  struct Event {
    SimTime fire_at;
    std::uint64_t sequence;
    Action action;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.sequence > b.sequence;
    }
  };

  std::vector<Event> queue_;  // binary heap ordered by Later
  SimTime now_{};
  std::uint64_t next_sequence_ = 0;
  std::uint64_t fired_ = 0;
  std::uint64_t budget_ = kDefaultEventBudget;
  std::uint64_t trace_hash_ = 1469598103934665603ULL;
};

}  // namespace hbmsim
