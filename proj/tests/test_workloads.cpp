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

#include <cmath>

#include "hbmsim/workloads.hpp"
#include "test_util.hpp"

using namespace hbmsim;

namespace {

constexpr std::uint64_t kSmall = kMiB / 4;

WorkloadSpec seq(CopyMode mode, unsigned pcs = 0) {
  WorkloadSpec s;
  s.kind = WorkloadKind::seq_copy;
  s.mode = mode;
  s.pc_num = pcs;
  s.bytes_per_pc = kSmall;
  return s;
}

double gbs(const BandwidthReport& r) { return r.eff_bw() / 1e9; }

}  // namespace

TEST_SUITE("workloads") {
  TEST_CASE("names parse back") {
    for (auto k : {WorkloadKind::seq_copy, WorkloadKind::strided, WorkloadKind::unicast, WorkloadKind::pointer_chase,
                   WorkloadKind::bucket_sort, WorkloadKind::radix_sort, WorkloadKind::binary_search, WorkloadKind::dfs,
                   WorkloadKind::bitwidth_sweep, WorkloadKind::freq_sweep})
      CHECK(parse_workload_kind(to_string(k)) == k);
    CHECK(parse_arch("bipa") == Arch::bipa);
    CHECK(parse_copy_mode("write_only") == CopyMode::write_only);
    CHECK_THROWS_AS(parse_workload_kind("fft"), ConfigError);
    CHECK_THROWS_AS(parse_arch("mesh"), ConfigError);
  }

  TEST_CASE("spec validation") {
    const PlatformProfile p = builtin_profile("u280");
    WorkloadSpec s;
    s.kind = WorkloadKind::strided;
    s.stride = 96;
    CHECK_THROWS_WITH_AS(s.validate(p), doctest::Contains("power of two"), ConfigError);
    s = WorkloadSpec{};
    s.kernel_clock = 400e6;
    CHECK_THROWS_AS(s.validate(p), ConfigError);
    s = WorkloadSpec{};
    s.pc_num = 31;
    CHECK_THROWS_AS(s.validate(p), ConfigError);
    s = WorkloadSpec{};
    s.read_pcs = {30};
    CHECK_THROWS_WITH_AS(s.validate(p), doctest::Contains("not usable"), ConfigError);
    s = WorkloadSpec{};
    s.blen = 64;
    s.fifo_depth = 32;
    CHECK_THROWS_AS(s.validate(p), ConfigError);
    s = WorkloadSpec{};
    s.key_bits = 20;
    CHECK_THROWS_AS(s.validate(p), ConfigError);
    s = WorkloadSpec{};
    s.kind = WorkloadKind::unicast;
    s.pattern = 3;
    CHECK_THROWS_AS(s.validate(p), ConfigError);
  }

  TEST_CASE("full efficiency gives exactly the ideal per-PC rate") {
    PlatformProfile p = builtin_profile("u280");
    p.per_pc_efficiency = 1.0;
    WorkloadSpec s = seq(CopyMode::read_only, 1);
    s.bytes_per_pc = 4 * kMiB;
    const BandwidthReport r = run_seq_copy(p, s);
    CHECK(r.correct);
    CHECK(gbs(r) == doctest::Approx(14.4).epsilon(1e-3));
    CHECK(gbs(r) <= 14.4 * (1 + 1e-9));
  }

  TEST_CASE("narrow top arguments are bounded by injection") {
    const PlatformProfile p = builtin_profile("u280");
    const auto sweep = run_bitwidth_sweep(p, seq(CopyMode::read_only), {128, 256, 512});
    REQUIRE(sweep.size() == 3);
    // 16 B x 300 MHz x 30 PCs
    CHECK(gbs(sweep[0]) <= 144.0 * (1 + 1e-9));
    CHECK(gbs(sweep[0]) == doctest::Approx(144.0).epsilon(0.03));
    CHECK(gbs(sweep[0]) < gbs(sweep[1]));
    CHECK(gbs(sweep[1]) < gbs(sweep[2]));
    for (const auto& r : sweep) CHECK(r.correct);
  }

  TEST_CASE("a slow kernel clock is injection bound") {
    const PlatformProfile p = builtin_profile("u280");
    const auto sweep = run_freq_sweep(p, seq(CopyMode::read_only), {50e6, 300e6});
    // 64 B x 50 MHz x 30 PCs
    CHECK(gbs(sweep[0]) == doctest::Approx(96.0).epsilon(0.02));
    const BandwidthReport full = run_seq_copy(p, seq(CopyMode::read_only));
    CHECK(gbs(sweep[1]) == doctest::Approx(gbs(full)).epsilon(1e-9));
    CHECK_THROWS_AS(run_freq_sweep(p, seq(CopyMode::read_only), {350e6}), ConfigError);
  }

  TEST_CASE("saturation knee interpolates between sweep points") {
    std::vector<BandwidthReport> sweep(3);
    const double bw[] = {50e9, 100e9, 100e9};
    for (int i = 0; i < 3; ++i) {
      sweep[i].kernel_clock = 100e6 * (i + 1);
      sweep[i].bytes_read = static_cast<std::uint64_t>(bw[i] / 1000);
      sweep[i].elapsed = SimTime::from_ns(1e6);
    }
    // 95 GB/s sits 90% of the way from 100 to 200 MHz.
    CHECK(saturation_knee(sweep) == doctest::Approx(190e6));
    CHECK_THROWS_AS(saturation_knee({}), ConfigError);
  }

  TEST_CASE("single-pair unicast matches the 16-PC copy") {
    const PlatformProfile p = builtin_profile("u280");
    WorkloadSpec u;
    u.kind = WorkloadKind::unicast;
    u.pattern = 1;
    u.bytes_per_pc = kSmall;
    const BandwidthReport uni = run_unicast(p, u);
    CHECK(uni.correct);
    CHECK(uni.pattern == "1x1");

    WorkloadSpec c = seq(CopyMode::read_write);
    c.read_pcs = {0, 1, 2, 3, 4, 5, 6, 7};
    c.write_pcs = {8, 9, 10, 11, 12, 13, 14, 15};
    const BandwidthReport copy = run_seq_copy(p, c);
    CHECK(copy.correct);
    CHECK(gbs(uni) == doctest::Approx(gbs(copy)).epsilon(0.01));


    c.write_pcs = {8, 9, 10, 11, 12, 13, 14, 7};
    CHECK_THROWS_AS(run_seq_copy(p, c), ConfigError);
  }

  TEST_CASE("degenerate pointer chase costs one beat, rounded to a kernel edge") {
    const PlatformProfile p = testing::idealized_u280();
    WorkloadSpec s;
    s.kind = WorkloadKind::pointer_chase;
    s.bytes_per_pc = kSmall;
    s.chain_length = 1000;
    const BandwidthReport r = run_pointer_chase(p, s);
    CHECK(r.correct);
    REQUIRE(r.latency_ns.has_value());
    const double beat_ns = 64.0 / 14.4;
    const double period_ns = 1e3 / 300.0;
    CHECK(*r.latency_ns == doctest::Approx(std::ceil(beat_ns / period_ns) * period_ns).epsilon(1e-3));
  }

  TEST_CASE("page hits are never slower than page misses") {
    const PlatformProfile p = builtin_profile("u280");
    for (auto flavor : {MasterFlavor::hls, MasterFlavor::rtl}) {
      WorkloadSpec near;
      near.kind = WorkloadKind::strided;
      near.master = flavor;
      near.pc_num = 4;
      near.bytes_per_pc = kSmall;
      near.stride = 256;
      WorkloadSpec far = near;
      far.stride = 8192;
      const BandwidthReport a = run_strided(p, near);
      const BandwidthReport b = run_strided(p, far);
      REQUIRE(a.bytes() == b.bytes());
      CHECK(a.elapsed <= b.elapsed);
    }
  }

  TEST_CASE("no run beats the per-PC sequential ceiling") {
    for (const auto& name : builtin_profile_names()) {
      CAPTURE(name);
      const PlatformProfile p = builtin_profile(name);
      const double ceiling = p.effective_pc_bw() * (1 + 1e-9);
      std::vector<WorkloadSpec> specs{seq(CopyMode::read_only, 2), seq(CopyMode::write_only, 2),
                                      seq(CopyMode::read_write, 2)};
      WorkloadSpec s;
      s.kind = WorkloadKind::strided;
      s.master = MasterFlavor::rtl;
      s.stride = 128;
      s.pc_num = 2;
      s.bytes_per_pc = kSmall;
      specs.push_back(s);
      for (const auto& spec : specs) {
        const BandwidthReport r = run_workload(p, spec);
        const double secs = r.elapsed.seconds();
        for (std::uint64_t bytes : r.per_pc) CHECK(static_cast<double>(bytes) / secs <= ceiling);
      }
    }
  }
}
