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

#include <random>

#include "hbmsim/arbitrators.hpp"

using namespace hbmsim;

namespace {

BicaConfig four_pcs(unsigned blen) {
  BicaConfig c;
  c.pc_targets = {8, 9, 10, 11};
  c.burst_len = blen;
  c.fifo_depth = 2 * blen;
  return c;
}

}  // namespace

TEST_SUITE("arbitrators") {
  TEST_CASE("BICA config validation") {
    BicaConfig c = four_pcs(16);
    CHECK_NOTHROW(c.validate());
    c.fifo_depth = 8;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = four_pcs(16);
    c.pc_targets = {1, 1};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = four_pcs(0);
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_THROWS_AS(Bica(four_pcs(4), {0, 0}), ConfigError);
  }

  TEST_CASE("BICA splits by PC and drains full bursts") {
    Bica b(four_pcs(4), {0, 0, 0, 1000});
    CHECK(b.fifo_of(10) == 2);
    CHECK_THROWS_AS(b.fifo_of(3), ConfigError);

    for (std::uint64_t i = 0; i < 3; ++i) CHECK(b.split({Line{i, 0}, 11}) == 3U);
    CHECK_FALSE(b.next_ready().has_value());
    CHECK(b.split({Line{3, 0}, 11}) == 3U);
    REQUIRE(b.next_ready() == 3U);

    const BicaBurst burst = b.drain(3);
    CHECK(burst.pc == 11);
    CHECK(burst.address == 1000);
    CHECK(burst.burst_len == 4);
    CHECK_FALSE(burst.flush);
    CHECK(burst.payload == std::vector<Line>{{0, 0}, {1, 0}, {2, 0}, {3, 0}});
    CHECK(b.cursor(3) == 1000 + 4 * 64);
    CHECK(b.empty());
    CHECK_THROWS_AS(b.drain(3), SimulationError);
  }

  TEST_CASE("a full BICA FIFO refuses records") {
    Bica b(four_pcs(2), {0, 0, 0, 0});
    for (int i = 0; i < 4; ++i) CHECK(b.split({Line{}, 8}).has_value());
    CHECK(b.full(0));
    CHECK_FALSE(b.split({Line{}, 8}).has_value());
    CHECK(b.records_in(0) == 4);
  }

  TEST_CASE("BICA flush emits the short remainder") {
    Bica b(four_pcs(4), {0, 0, 0, 0});
    b.split({Line{7, 0}, 9});
    b.split({Line{8, 0}, 9});
    CHECK_FALSE(b.next_ready().has_value());
    REQUIRE(b.next_nonempty() == 1U);
    const BicaBurst tail = b.drain(1, true);
    CHECK(tail.flush);
    CHECK(tail.burst_len == 2);
    CHECK(tail.payload == std::vector<Line>{{7, 0}, {8, 0}});
    CHECK(b.empty());
  }

  TEST_CASE("BICA drains ready FIFOs round-robin") {
    Bica b(four_pcs(1), {0, 0, 0, 0});
    for (unsigned pc : {8U, 9U, 11U}) b.split({Line{}, pc});
    CHECK(b.drain(*b.next_ready()).pc == 8);
    b.split({Line{}, 8});
    CHECK(b.drain(*b.next_ready()).pc == 9);
    CHECK(b.drain(*b.next_ready()).pc == 11);
    CHECK(b.drain(*b.next_ready()).pc == 8);
  }

  TEST_CASE("BICA preserves per-PC order and count on a random stream") {
    Bica b(four_pcs(16), {0, 0, 0, 0});
    std::mt19937_64 rng(7);
    std::vector<std::vector<std::uint64_t>> sent(4), written(4);
    auto drain_ready = [&](bool flush) {
      for (;;) {
        auto f = flush ? b.next_nonempty() : b.next_ready();
        if (!f) return;
        const BicaBurst burst = b.drain(*f, flush);
        if (!burst.flush) CHECK(burst.burst_len == 16);
        for (const Line& l : burst.payload) written[*f].push_back(l.word);
      }
    };
    for (std::uint64_t i = 0; i < 5000; ++i) {
      const unsigned pc = 8 + static_cast<unsigned>(rng() % 4);
      while (!b.split({Line{i, 0}, pc})) drain_ready(false);
      sent[pc - 8].push_back(i);
    }
    drain_ready(true);
    for (unsigned f = 0; f < 4; ++f) {
      CHECK(written[f] == sent[f]);
      CHECK(b.records_in(f) == b.records_out(f));
    }
  }

  TEST_CASE("round robin skips idle PEs and wraps") {
    RoundRobinState st;
    std::vector<std::size_t> pending{0, 3};
    ArbitrationResult r = round_robin_pick(st, pending);
    CHECK(r.granted == 1U);
    CHECK(r.scanned == 2);
    CHECK(st.next_index == 0);

    pending = {1, 1, 1};
    st.next_index = 2;
    r = round_robin_pick(st, pending);
    CHECK(r.granted == 2U);
    CHECK(r.scanned == 1);
    CHECK(round_robin_pick(st, pending).granted == 0U);

    pending = {0, 0, 0};
    r = round_robin_pick(st, pending);
    CHECK_FALSE(r.granted.has_value());
    CHECK(r.scanned == 3);
  }

  TEST_CASE("BIPA alternates between two busy PEs and routes responses by tag") {
    Bipa bipa(BipaConfig{2, 512, 1, 1, false});
    for (std::uint64_t i = 0; i < 4; ++i) {
      bipa.push_request(0, 100 + i);
      bipa.push_request(1, 200 + i);
    }
    std::vector<unsigned> order;
    std::vector<BipaGrant> grants;
    while (auto g = bipa.arbitrate()) {
      order.push_back(g->pe);
      grants.push_back(*g);
    }
    CHECK(order == std::vector<unsigned>{0, 1, 0, 1, 0, 1, 0, 1});
    CHECK(grants[1].address == 200);
    CHECK(bipa.tags_in_flight() == 8);
    for (auto it = grants.rbegin(); it != grants.rend(); ++it) CHECK(bipa.route_response(it->tag) == it->pe);
    CHECK(bipa.tags_in_flight() == 0);
    CHECK(bipa.tags_retired() == bipa.tags_issued());
    CHECK_THROWS_AS(bipa.route_response(grants[0].tag), SimulationError);
    CHECK(bipa.response_latency_cycles() == 2);
  }

  TEST_CASE("write-only BIPA issues no tags") {
    Bipa bipa(BipaConfig{4, 512, 1, 1, true});
    bipa.push_request(3, 1);
    CHECK(bipa.arbitrate()->pe == 3);
    CHECK(bipa.tags_issued() == 0);
  }

  TEST_CASE("BIPA never starves a continuously pending PE") {
    for (unsigned pes : {2U, 4U, 8U, 16U}) {
      CAPTURE(pes);
      Bipa bipa(BipaConfig{pes, 512, 1, 1, false});
      for (unsigned pe = 0; pe < pes; ++pe) bipa.push_request(pe, 0);
      std::vector<std::uint64_t> window(pes, 0);
      for (unsigned round = 1; round <= 20 * pes; ++round) {
        const auto g = bipa.arbitrate();
        REQUIRE(g.has_value());
        ++window[g->pe];
        bipa.push_request(g->pe, round);
        bipa.route_response(g->tag);
        if (round % (3 * pes) == 0) {
          const auto [lo, hi] = std::minmax_element(window.begin(), window.end());
          CHECK(*hi - *lo <= 1);
        }
      }
    }
  }

  TEST_CASE("BIPA config validation") {
    CHECK_THROWS_AS(Bipa(BipaConfig{0, 512, 1, 1, false}), ConfigError);
    CHECK_THROWS_AS(Bipa(BipaConfig{2, 500, 1, 1, false}), ConfigError);
    CHECK_THROWS_AS(Bipa(BipaConfig{2, 512, 0, 1, false}), ConfigError);
  }
}
