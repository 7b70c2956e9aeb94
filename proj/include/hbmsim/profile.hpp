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
 * @file profile.hpp
 * @brief Board timing and topology parameters.
 *
 * A PlatformProfile carries everything that differs between the modeled
 * boards: pseudo-channel count and capacity, clocks and widths on both sides
 * of the rate-matching FIFOs, DRAM page behavior, the crossbar shape and the
 * outstanding-request behavior of the generated AXI masters.
 *
 * Profiles serialize to JSON with explicit unit suffixes (`_ns`, `_mhz`,
 * `_gbs`, `_bits`, `_bytes`). GB/s means 1e9 bytes per second.
 */
#pragma once

#include <bitset>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hbmsim/sim_core.hpp"

namespace hbmsim {

inline constexpr std::size_t kMaxPcs = 64;
inline constexpr unsigned kMaxBurstLen = 256;

enum class BurstInference { automatic, always_one };

/// Kernel-side AXI master behavior.
struct AxiMasterProfile {
  unsigned max_outstanding_reads = 8;
  unsigned max_outstanding_writes = 8;
  unsigned max_burst_len = 64;
  BurstInference burst_inference = BurstInference::automatic;

  void validate() const;
};

/// Linear chain of unit switches; lateral hops have a per-direction budget.
struct CrossbarTopology {
  unsigned unit_switches = 8;
  unsigned ports_per_switch = 4;
  /// Bytes/s per direction per adjacent-switch hop. 0 means unlimited.
  double lateral_bw = 0.0;
  /// Added latency for each lateral hop crossed.
  SimTime hop_latency{};

  unsigned switch_of(unsigned port) const { return port / ports_per_switch; }
  void validate() const;
};

struct PlatformProfile {
  std::string name;
  unsigned pc_count = 32;
  std::bitset<kMaxPcs> usable_pc_mask;
  std::uint64_t pc_capacity = 256ULL << 20;

  unsigned slave_data_width = 256;
  double slave_clock = 450e6;
  unsigned master_data_width = 512;
  double kernel_clock_max = 300e6;

  double ideal_total_bw = 460e9;
  double per_pc_efficiency = 0.90;

  std::uint64_t page_size = 4096;
  unsigned banks_per_pc = 16;
  /// Minimum spacing between row activations within one pseudo channel.
  SimTime t_rc = SimTime::from_ns(29.0);
  /// Extra access latency when the target row is not open.
  SimTime t_page_miss{};
  /// Controller plus DRAM pipeline latency of a page-hit access.
  SimTime lat_hbm{};
  SimTime lat_pe_default{};

  CrossbarTopology crossbar;
  AxiMasterProfile hls_master;
  AxiMasterProfile rtl_master;
  bool burst_len_fixed_to_one = false;
  /// One read PE and one write PE per bundle (Alveo dataflow rule).
  bool enforce_bundle_rules = true;

  double ideal_pc_bw() const { return ideal_total_bw / pc_count; }
  /// Sustainable sequential bandwidth of one pseudo channel.
  double effective_pc_bw() const { return per_pc_efficiency * ideal_pc_bw(); }
  std::uint64_t total_capacity() const { return pc_capacity * pc_count; }
  bool usable(unsigned pc) const { return pc < pc_count && usable_pc_mask.test(pc); }
  std::vector<unsigned> usable_pcs() const;
  ClockDomain slave_domain() const { return ClockDomain("slave", slave_clock); }

  /// Throws ConfigError describing the first violated invariant.
  void validate() const;
};

/// Names of the profiles compiled into the library.
std::vector<std::string> builtin_profile_names();
/// Throws ConfigError for an unknown name.
PlatformProfile builtin_profile(const std::string& name);

PlatformProfile profile_from_json(const nlohmann::json& j);
nlohmann::json profile_to_json(const PlatformProfile& p);
/// Reads a JSON profile file, or resolves a builtin name when `ref` is not a path.
PlatformProfile load_profile(const std::string& ref);

/// Per-PC sustainable bandwidth; the sequential access ceiling.
double sequential_bandwidth_bound(const PlatformProfile& p);

}  // namespace hbmsim
