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

#include "hbmsim/sim_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hbmsim {

SimTime SimTime::from_ns(double ns) {
  if (!(ns > 0.0)) return SimTime{};
  return SimTime(static_cast<std::uint64_t>(std::llround(ns * 1e3)));
}

SimTime SimTime::transfer(double bytes, double bytes_per_second) {
  if (!(bytes > 0.0)) return SimTime{};
  if (!(bytes_per_second > 0.0)) throw SimulationError("transfer at non-positive rate");
  return SimTime(static_cast<std::uint64_t>(std::ceil(bytes * 1e12 / bytes_per_second - 1e-6)));
}

ClockDomain::ClockDomain(std::string name, double frequency_hz, SimTime phase_origin)
    : name_(std::move(name)), frequency_(frequency_hz), origin_(phase_origin) {
  if (!(frequency_hz > 0.0)) throw ConfigError("clock '" + name_ + "' needs a positive frequency");
  auto period = static_cast<std::uint64_t>(std::llround(1e12 / frequency_hz));
  period_ = SimTime(std::max<std::uint64_t>(period, 1));
}

SimTime ClockDomain::next_edge(SimTime t) const {
  if (t <= origin_) return origin_;
  std::uint64_t offset = (t - origin_).ps();
  std::uint64_t p = period_.ps();
  std::uint64_t cycles = (offset + p - 1) / p;
  return origin_ + SimTime(cycles * p);
}

SimTime next_edge(const ClockDomain& domain, SimTime t) { return domain.next_edge(t); }

EventId Engine::schedule(SimTime at, Action action) {
  if (at < now_) {
    std::ostringstream msg;
    msg << "event scheduled in the past: at=" << at.ps() << "ps now=" << now_.ps() << "ps";
    throw SimulationError(msg.str());
  }
  EventId id = next_sequence_++;
  queue_.push_back(Event{at, id, std::move(action)});
  std::push_heap(queue_.begin(), queue_.end(), Later{});
  return id;
}

std::uint64_t Engine::run_until(SimTime limit) {
  std::uint64_t fired = 0;
  while (!queue_.empty() && queue_.front().fire_at <= limit) {
    if (fired_ >= budget_) {
      std::ostringstream msg;
      msg << "event budget of " << budget_ << " exceeded at t=" << now_.ps()
          << "ps with " << queue_.size() << " pending events (livelock?)";
      throw SimulationError(msg.str());
    }
    std::pop_heap(queue_.begin(), queue_.end(), Later{});
    Event ev = std::move(queue_.back());
    queue_.pop_back();
    if (ev.fire_at < now_) throw SimulationError("dispatcher went back in time");
    now_ = ev.fire_at;
    for (std::uint64_t word : {ev.fire_at.ps(), ev.sequence}) {
      for (int i = 0; i < 8; ++i) {
        trace_hash_ ^= (word >> (8 * i)) & 0xffU;
        trace_hash_ *= 1099511628211ULL;
      }
    }
    ++fired_;
    ++fired;
    ev.action();
  }
  return fired;
}

std::uint64_t Engine::run() { return run_until(SimTime(~std::uint64_t{0})); }

}  // namespace hbmsim
