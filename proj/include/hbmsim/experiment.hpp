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
 * @file experiment.hpp
 * @brief Experiment configuration files, sweep expansion and the parallel
 * runner behind `hbmsim run`.
 *
 * A config is a JSON object:
 * @code
 * {
 *   "profile": "u280",                  // builtin name, file path, or inline object
 *   "seed": 7,
 *   "parallelism": 4,
 *   "output": {"path": "out.csv", "format": "csv"},
 *   "bindings": [{"master": 0, "read_pes": [0], "write_pes": [0], "target_pcs": [0]}],
 *   "sweeps": {"blen": [16, 32, 64]},
 *   "workloads": [{"kind": "bucket_sort", "arch": "bica", "kernel_clock_mhz": 220}]
 * }
 * @endcode
 * Sweep grids (blen, pe_count, stride, freq_mhz, width, pattern) apply to
 * every workload; a workload's own "sweeps" object replaces the global one.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hbmsim/profile.hpp"
#include "hbmsim/workloads.hpp"

namespace hbmsim {

struct SweepGrid {
  std::vector<unsigned> blen;
  std::vector<unsigned> pe_count;
  std::vector<std::uint64_t> stride;
  std::vector<double> freq_hz;
  std::vector<unsigned> width;
  std::vector<unsigned> pattern;

  bool empty() const;
};

enum class ReportFormat { csv, json };

struct OutputSpec {
  std::string path = "hbmsim_report.csv";
  ReportFormat format = ReportFormat::csv;
};

struct ExperimentConfig {
  PlatformProfile profile;
  std::vector<WorkloadSpec> workloads;
  /// Per-workload grids; entries mirror `workloads`.
  std::vector<SweepGrid> sweeps;
  std::vector<BundleBinding> bindings;
  OutputSpec output;
  std::uint64_t seed = 1;
  unsigned parallelism = 1;
};

/// Parses a config document. `base_dir` resolves relative profile paths.
/// Errors name the offending field, e.g. "workloads[1].blen: ...".
ExperimentConfig parse_experiment(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

/// Reads and parses a config file; JSON syntax errors report line and column.
ExperimentConfig load_experiment(const std::filesystem::path& path);

WorkloadSpec workload_from_json(const nlohmann::json& j, const std::string& where = "workload");
nlohmann::json workload_to_json(const WorkloadSpec& s);

/// Checks every workload and binding against the profile, including the
/// one-read-PE-per-bundle rule for multi-PE baselines. Throws ConfigError.
void validate_experiment(const ExperimentConfig& cfg);

/// Deterministic expansion: workloads in order, each grid as a cartesian
/// product in the order blen, pe_count, stride, freq, width, pattern.
std::vector<WorkloadSpec> expand(const ExperimentConfig& cfg);

/// One-line description of a fully expanded spec, for logs.
std::string describe(const WorkloadSpec& s);

/// One simulation: the profile it runs on and what it runs.
struct Job {
  PlatformProfile profile;
  WorkloadSpec spec;
};

/// Runs jobs on up to `parallelism` threads; results keep input order.
/// The lowest-index failure is rethrown after all workers stop.
std::vector<BandwidthReport> run_jobs(const std::vector<Job>& jobs, unsigned parallelism);

/// run_jobs with one profile for every spec.
std::vector<BandwidthReport> run_specs(const PlatformProfile& profile, const std::vector<WorkloadSpec>& specs,
                                       unsigned parallelism);

/// HBMSIM_PARALLELISM when set and valid, else `fallback`.
unsigned env_parallelism(unsigned fallback);
/// HBMSIM_OUTPUT_DIR when set, else `fallback`.
std::filesystem::path env_output_dir(const std::filesystem::path& fallback);

/// Writes reports in the chosen format, creating parent directories.
void write_reports(const std::filesystem::path& path, ReportFormat format, const std::vector<BandwidthReport>& reports);

}  // namespace hbmsim
