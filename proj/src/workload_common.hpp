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

// Internal helpers shared by the workload drivers.
#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "hbmsim/system.hpp"
#include "hbmsim/workloads.hpp"

namespace hbmsim::detail {

/// Stateless 64-bit mixer; content generators use it so any line can be
/// produced on demand without storing the data set.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) { return mix64(a ^ mix64(b)); }

/// Source content of line `line` in PC `pc` for a run seeded with `seed`.
inline Line source_line(std::uint64_t seed, unsigned pc, std::uint64_t line) {
  const std::uint64_t h = mix64(mix64(seed, pc), line);
  return Line{h, line ^ (std::uint64_t{pc} << 48)};
}

/// Uniform integer in [0, n) from a 64-bit engine, without the
/// implementation-defined std distributions.
inline std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) {
  // Lemire's multiply-shift; the tiny bias is irrelevant for workload data.
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

/// A system plus the kernel clock and derived PE latency of one run.
struct RunContext {
  RunContext(const PlatformProfile& profile, const WorkloadSpec& spec);

  std::unique_ptr<HbmSystem> sys;
  ClockDomain kernel;
  unsigned data_width = 512;
  /// PE pipeline latency in kernel cycles of the run's clock.
  std::uint64_t lat_pe_cycles = 0;

  SimTime cycles(std::uint64_t n) const { return kernel.cycles(n); }
  SimTime edge(SimTime t) const { return kernel.next_edge(t); }

  /// Builds a read request; ids come from the system.
  MemRequest request(AccessKind kind, unsigned pc, std::uint64_t address, unsigned blen, unsigned pe = 0);

  /// Runs the engine to exhaustion.
  void run();

  /// Fills common report fields and checks byte conservation; throws
  /// SimulationError when bytes served and bytes submitted disagree.
  void finish(BandwidthReport& r, SimTime end) const;
};

BandwidthReport base_report(const PlatformProfile& profile, const WorkloadSpec& spec, const RunContext& ctx);

/// PCs a workload uses when the spec does not list them.
std::vector<unsigned> default_pcs(const PlatformProfile& profile, unsigned count);

}  // namespace hbmsim::detail
