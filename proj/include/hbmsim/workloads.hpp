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
 * @file workloads.hpp
 * @brief Behavioral PE models for the microbenchmarks and applications.
 *
 * Every run builds a fresh HbmSystem, drives it to completion and checks the
 * result functionally before reporting a bandwidth. A report whose oracle
 * failed has `correct == false` and must not be used as a measurement.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hbmsim/interconnect.hpp"
#include "hbmsim/profile.hpp"
#include "hbmsim/sim_core.hpp"

namespace hbmsim {

enum class WorkloadKind {
  seq_copy,
  strided,
  bitwidth_sweep,
  freq_sweep,
  unicast,
  pointer_chase,
  bucket_sort,
  radix_sort,
  binary_search,
  dfs,
};

enum class Arch { baseline, bica, bipa };
enum class CopyMode { read_write, read_only, write_only };

const char* to_string(WorkloadKind k);
const char* to_string(Arch a);
const char* to_string(CopyMode m);
WorkloadKind parse_workload_kind(const std::string& s);
Arch parse_arch(const std::string& s);
CopyMode parse_copy_mode(const std::string& s);

inline constexpr std::uint64_t kMiB = 1024ULL * 1024ULL;

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::seq_copy;
  Arch arch = Arch::baseline;
  CopyMode mode = CopyMode::read_write;
  MasterFlavor master = MasterFlavor::hls;

  std::uint64_t bytes_per_pc = 4 * kMiB;
  /// Number of PCs driven; 0 means every usable PC (or the workload default).
  unsigned pc_num = 0;
  /// Explicit PC lists. Empty means the workload default layout.
  std::vector<unsigned> read_pcs;
  std::vector<unsigned> write_pcs;

  /// Hz; 0 means the profile's kernel_clock_max.
  double kernel_clock = 0.0;
  /// Bits of the kernel top argument; 0 means the profile's master width.
  unsigned data_width = 0;

  std::uint64_t stride = 64;
  /// n of an n x n unicast pattern.
  unsigned pattern = 1;
  unsigned blen = 64;
  unsigned fifo_depth = 64;
  unsigned pes_per_pc = 1;
  unsigned arbitration_cost = 1;
  unsigned response_routing_cost = 1;
  /// Effective key width of radix sort, a multiple of 3.
  unsigned key_bits = 24;
  /// Pointer-chase chain length.
  std::uint64_t chain_length = 16384;
  /// PE pipeline latency override; defaults to the profile's lat_pe.
  std::optional<SimTime> lat_pe;
  /// Test hook: input keys already in ascending order.
  bool presorted = false;
  /// Test hook: every key goes to this bucket.
  std::optional<unsigned> single_bucket;
  /// Test hook: tree size override for dfs (nodes per PC).
  std::uint64_t tree_nodes = 0;

  std::uint64_t seed = 1;

  void validate(const PlatformProfile& p) const;
};

/// Bytes moved and time taken by one run.
struct BandwidthReport {
  std::string workload;
  std::string profile;
  std::string pattern;
  std::string arch;
  unsigned blen = 0;
  unsigned pe_num = 1;
  unsigned pc_num = 0;
  unsigned data_width = 0;
  double kernel_clock = 0.0;  // Hz

  std::uint64_t bytes_read = 0;
  std::uint64_t bytes_written = 0;
  SimTime elapsed{};
  std::vector<std::uint64_t> per_pc;

  /// Round-trip latency per dependent access (pointer chase, searches).
  std::optional<double> latency_ns;
  std::optional<double> lat_pe_ns;
  std::optional<double> lat_mem_ns;

  bool correct = false;
  std::string note;
  std::uint64_t events = 0;
  std::uint64_t trace_hash = 0;

  std::uint64_t bytes() const { return bytes_read + bytes_written; }
  double eff_bw() const;  // bytes/s
};

/// Runs `spec` on `profile` according to spec.kind.
BandwidthReport run_workload(const PlatformProfile& profile, const WorkloadSpec& spec);

BandwidthReport run_seq_copy(const PlatformProfile& profile, const WorkloadSpec& spec);
BandwidthReport run_strided(const PlatformProfile& profile, const WorkloadSpec& spec);
std::vector<BandwidthReport> run_bitwidth_sweep(const PlatformProfile& profile, const WorkloadSpec& spec,
                                                const std::vector<unsigned>& widths);
std::vector<BandwidthReport> run_freq_sweep(const PlatformProfile& profile, const WorkloadSpec& spec,
                                            const std::vector<double>& freqs_hz);
BandwidthReport run_unicast(const PlatformProfile& profile, const WorkloadSpec& spec);
BandwidthReport run_pointer_chase(const PlatformProfile& profile, const WorkloadSpec& spec);
BandwidthReport run_bucket_sort(const PlatformProfile& profile, const WorkloadSpec& spec);
BandwidthReport run_radix_sort(const PlatformProfile& profile, const WorkloadSpec& spec);
BandwidthReport run_binary_search(const PlatformProfile& profile, const WorkloadSpec& spec);
BandwidthReport run_dfs(const PlatformProfile& profile, const WorkloadSpec& spec);

/// Lowest frequency whose bandwidth reaches `fraction` of the sweep maximum.
double saturation_knee(const std::vector<BandwidthReport>& sweep, double fraction = 0.95);

}  // namespace hbmsim
