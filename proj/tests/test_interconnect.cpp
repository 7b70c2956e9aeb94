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

#include "hbmsim/interconnect.hpp"
#include "hbmsim/system.hpp"

using namespace hbmsim;

namespace {

CrossbarTopology toy_topology() {
  CrossbarTopology t;
  t.lateral_bw = 64e9;
  t.hop_latency = SimTime::from_ns(2);
  return t;
}

}  // namespace

TEST_SUITE("interconnect") {
  TEST_CASE("bundle rule rejects a second read PE") {
    const PlatformProfile p = builtin_profile("u280");
    CHECK_NOTHROW(validate_binding(p, BundleBinding{0, {0}, {1}, {0}}));
    CHECK_THROWS_WITH_AS(validate_binding(p, BundleBinding{0, {0, 1}, {}, {0}}),
                         doctest::Contains("only one read PE and one write PE"), ConfigError);
    CHECK_THROWS_WITH_AS(validate_binding(p, BundleBinding{0, {}, {2, 3}, {0}}),
                         doctest::Contains("only one read PE and one write PE"), ConfigError);

    PlatformProfile relaxed = p;
    relaxed.enforce_bundle_rules = false;
    CHECK_NOTHROW(validate_binding(relaxed, BundleBinding{0, {0, 1}, {2, 3}, {0}}));
  }

  TEST_CASE("binding checks PCs and ports") {
    const PlatformProfile p = builtin_profile("u280");
    CHECK_THROWS_AS(validate_binding(p, BundleBinding{0, {0}, {}, {}}), ConfigError);
    CHECK_THROWS_AS(validate_binding(p, BundleBinding{32, {0}, {}, {0}}), ConfigError);
    // Two of the u280's PCs are reserved.
    const auto usable = p.usable_pcs();
    CHECK(usable.size() == 30);
    for (unsigned pc = 0; pc < p.pc_count; ++pc) {
      if (!p.usable(pc)) {
        CHECK_THROWS_WITH_AS(validate_binding(p, BundleBinding{0, {0}, {}, {pc}}), doctest::Contains("not usable"),
                             ConfigError);
      }
    }
  }

  TEST_CASE("local routes are free, lateral routes pay per hop") {
    Crossbar x(toy_topology());
    CHECK(x.local(0, 3));
    CHECK_FALSE(x.local(3, 4));
    CHECK(x.hops(0, 8) == 2);
    CHECK(x.hops(31, 0) == 7);

    CHECK(x.route(0, 3, 64, SimTime{}).ps() == 0);
    // Two hops: 2 x 2 ns latency plus one 1 ns transfer.
    CHECK(x.route(0, 8, 64, SimTime{}).ps() == 5000);
    // Same hops, same direction: queued behind the first transfer.
    CHECK(x.route(0, 8, 64, SimTime{}).ps() == 6000);
    // The opposite direction has its own budget.
    CHECK(x.route(0, 8, 64, SimTime{}, LinkDirection::pc_to_master).ps() == 5000);

    CHECK(x.bytes_entered(0, true) == 128);
    CHECK(x.bytes_entered(1, true) == 128);
    CHECK(x.bytes_entered(0, false) == 64);
    CHECK(x.bytes_left(1, true) == x.bytes_entered(1, true));
    CHECK(x.lateral_bytes() == 128 + 128 + 64 + 64);
  }

  TEST_CASE("burst inference") {
    AxiMasterProfile m;
    m.max_burst_len = 64;
    CHECK(infer_burst(m, AccessStream{256, 0, false}) == std::vector<unsigned>(4, 64U));
    CHECK(infer_burst(m, AccessStream{100, 0, false}) == std::vector<unsigned>{64, 36});
    CHECK(infer_burst(m, AccessStream{10, 5, false}) == std::vector<unsigned>{5, 5});
    // Data-dependent targets defeat inference.
    CHECK(infer_burst(m, AccessStream{6, 0, true}) == std::vector<unsigned>(6, 1U));
    m.burst_inference = BurstInference::always_one;
    CHECK(infer_burst(m, AccessStream{3, 0, false}) == std::vector<unsigned>(3, 1U));
    CHECK(infer_burst(m, AccessStream{0, 0, false}).empty());
  }

  TEST_CASE("outstanding window bounds requests in flight") {
    HbmSystem sys(builtin_profile("u280"));
    AxiMaster& m = sys.add_master(BundleBinding{0, {0}, {}, {0}}, MasterFlavor::hls, ClockDomain("k", 300e6));
    CHECK(m.profile().max_outstanding_reads == 4);
    int done = 0;
    for (int i = 0; i < 32; ++i) {
      MemRequest r;
      r.id = sys.next_request_id();
      r.address = static_cast<std::uint64_t>(i) * 4096;
      m.submit(r, {}, [&](const MemRequest&, std::vector<Line>&&, SimTime) { ++done; });
    }
    sys.engine().run();
    CHECK(done == 32);
    CHECK(m.max_in_flight_seen(AccessKind::read) == 4);
    CHECK(m.in_flight(AccessKind::read) == 0);
  }

  TEST_CASE("requests to unbound PCs or oversize bursts are rejected") {
    HbmSystem sys(builtin_profile("u280"));
    AxiMaster& m = sys.add_master(BundleBinding{0, {0}, {}, {0}}, MasterFlavor::hls, ClockDomain("k", 300e6));
    MemRequest r;
    r.pc = 1;
    CHECK_THROWS_WITH_AS(m.submit(r, {}, {}), doctest::Contains("no binding"), ConfigError);
    r.pc = 0;
    r.burst_len = 128;
    CHECK_THROWS_AS(m.submit(r, {}, {}), ConfigError);
  }
}
