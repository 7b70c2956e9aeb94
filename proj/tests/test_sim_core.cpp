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

#include <doctest.h>

#include <vector>

#include "hbmsim/sim_core.hpp"

using namespace hbmsim;

TEST_SUITE("sim_core") {
  TEST_CASE("next_edge rounds up to the following rising edge") {
    const ClockDomain slave("slave", 450e6);
    CHECK(slave.period().ps() == 2222);
    CHECK(next_edge(slave, SimTime(1)).ps() == 2222);
    CHECK(next_edge(slave, SimTime(0)).ps() == 0);
    CHECK(next_edge(slave, SimTime(2222)).ps() == 2222);
    CHECK(next_edge(slave, SimTime(2223)).ps() == 4444);

    const ClockDomain kernel("kernel", 300e6);
    CHECK(kernel.period().ps() == 3333);
    CHECK(kernel.next_edge(SimTime(1)).ps() == 3333);

    const ClockDomain k200("kernel", 200e6);
    CHECK(k200.next_edge(SimTime(5000)).ps() == 5000);
    CHECK(k200.next_edge(SimTime(5001)).ps() == 10000);
  }

  TEST_CASE("phase origin shifts every edge") {
    const ClockDomain c("c", 250e6, SimTime(1000));
    CHECK(c.next_edge(SimTime(0)).ps() == 1000);
    CHECK(c.next_edge(SimTime(1001)).ps() == 5000);
  }

  TEST_CASE("clocks need a positive frequency") {
    CHECK_THROWS_AS(ClockDomain("bad", 0.0), ConfigError);
    CHECK_THROWS_AS(ClockDomain("bad", -5.0), ConfigError);
  }

  TEST_CASE("SimTime conversions") {
    CHECK(SimTime::from_ns(29.0).ps() == 29000);
    CHECK(SimTime::from_ns(-1.0).ps() == 0);
    CHECK(SimTime::transfer(64, 64e9).ps() == 1000);
    // A fractional picosecond is rounded up, never down.
    CHECK(SimTime::transfer(64, 13.0e9).ps() == 4924);
    CHECK(SimTime::transfer(0, 1e9).ps() == 0);
    CHECK_THROWS_AS(SimTime::transfer(1, 0.0), SimulationError);
    CHECK((SimTime(5) - SimTime(9)).ps() == 0);
  }

  TEST_CASE("same-time events fire in scheduling order") {
    Engine e;
    std::vector<int> order;
    e.schedule(SimTime(100), [&] { order.push_back(3); });
    e.schedule(SimTime(50), [&] { order.push_back(1); });
    e.schedule(SimTime(50), [&] { order.push_back(2); });
    e.schedule(SimTime(100), [&] { order.push_back(4); });
    CHECK(e.run() == 4);
    CHECK(order == std::vector<int>{1, 2, 3, 4});
    CHECK(e.now().ps() == 100);
  }

  TEST_CASE("events may schedule at the current time but not before it") {
    Engine e;
    int fired = 0;
    e.schedule(SimTime(10), [&] {
      e.schedule_in(SimTime(0), [&] { ++fired; });
      CHECK_THROWS_AS(e.schedule(SimTime(9), [] {}), SimulationError);
    });
    e.run();
    CHECK(fired == 1);
  }

  TEST_CASE("run_until stops at the limit and keeps later events") {
    Engine e;
    for (std::uint64_t t : {10, 20, 30, 40}) e.schedule(SimTime(t), [] {});
    CHECK(e.run_until(SimTime(25)) == 2);
    CHECK(e.pending() == 2);
    CHECK(e.now().ps() == 20);
    CHECK(e.run() == 2);
    CHECK(e.empty());
    CHECK(e.events_fired() == 4);
  }

  TEST_CASE("event budget aborts a livelock with a diagnostic") {
    Engine e;
    e.set_event_budget(100);
    std::function<void()> spin = [&] { e.schedule_in(SimTime(1), spin); };
    e.schedule(SimTime(0), spin);
    try {
      e.run();
      FAIL("no abort");
    } catch (const SimulationError& err) {
      CHECK(std::string(err.what()).find("budget") != std::string::npos);
    }
    CHECK(e.events_fired() == 100);
  }

  TEST_CASE("trace hash depends on the event sequence") {
    auto hash_of = [](std::vector<std::uint64_t> times) {
      Engine e;
      for (auto t : times) e.schedule(SimTime(t), [] {});
      e.run();
      return e.trace_hash();
    };
    CHECK(hash_of({1, 2, 3}) == hash_of({1, 2, 3}));
    CHECK(hash_of({1, 2, 3}) != hash_of({1, 2, 4}));
  }
}
