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
 * @file analytic.hpp
 * @brief Closed-form burst and arbitration bandwidth models, plus the
 * extraction of their parameters from simulated microbenchmarks.
 */
#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "hbmsim/sim_core.hpp"
#include "hbmsim/workloads.hpp"

namespace hbmsim {

struct AnalyticParams {
  /// Sequential ceiling of one PC, bytes/s.
  double bw_max = 13.0e9;
  /// Single-beat strided bandwidth of one PC, bytes/s.
  double bw_str = 1.4e9;
  /// Many-to-many unicast ceiling, bytes/s.
  double bw_mc = 96.0e9;
  SimTime lat_hbm = SimTime::from_ns(182.0);
  SimTime lat_pe = SimTime::from_ns(47.0);
  unsigned dw = 512;
  /// Kernel clock the arbitration cycles and lat_pe refer to, Hz.
  double kernel_clock = 300e6;

  /// Throws ConfigError unless every rate and the width are positive.
  void validate() const;

  /// The same PE pipeline at another kernel clock: lat_pe keeps its cycle
  /// count, so it scales with the period.
  AnalyticParams at_clock(double hz) const;

  bool operator==(const AnalyticParams&) const = default;
};

/// Burst completion time: blen × dw / bw_max + lat.
SimTime t_bur(unsigned blen, unsigned dw, double bw_max, SimTime lat);

/// Batched-burst bandwidth, min(pc_num × blen × dw / t_bur, bw_mc), bytes/s.
/// `lat` is the per-burst latency; read round trip and write acknowledgment
/// are both plausible, so the caller chooses.
double bica_bw(unsigned pc_num, unsigned blen, const AnalyticParams& p, SimTime lat);

enum class BipaForm {
  /// pc_num × dw / (dw/bw_str + lat_hbm + lat_pe + 2 pe_num cycles).
  consistent,
  /// Symbols taken literally in GB/s, ns and bits, result in GB/s × 1e9.
  as_printed,
  /// Every PE has one request in flight and the PC time-slices between
  /// them: pc_num / (1/bw_str + lat/(pe_num × dw)) with the same lat.
  time_shared,
};

/// Shared-PC arbitration bandwidth, bytes/s.
double bipa_bw(unsigned pc_num, unsigned pe_num, const AnalyticParams& p, BipaForm form = BipaForm::consistent);

/**
 * Extracts parameters from simulated microbenchmarks:
 * - bw_max from a single-PC seq_copy,
 * - bw_str per PC from the strided run with the largest stride,
 * - bw_mc from an 8x8 unicast,
 * - lat_hbm and lat_pe from the pointer-chase decomposition, lat_hbm net
 *   of one line transfer at bw_max (clamped at zero).
 * Throws ConfigError naming every missing report.
 */
AnalyticParams calibrate(const std::vector<BandwidthReport>& reports);

/// The four microbenchmarks calibrate() needs, sized for `profile`:
/// one-PC sequential read, 4 KiB strided read, 8x8 unicast, pointer chase.
std::vector<WorkloadSpec> calibration_specs(const PlatformProfile& profile, std::uint64_t bytes_per_pc = 4 * kMiB);

nlohmann::json analytic_to_json(const AnalyticParams& p);
AnalyticParams analytic_from_json(const nlohmann::json& j);

}  // namespace hbmsim
