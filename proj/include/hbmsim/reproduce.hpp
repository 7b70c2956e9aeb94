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
 * @file reproduce.hpp
 * @brief Side-by-side comparison of simulated results with published
 * hardware measurements.
 *
 * Reference cells live in data/paper_reference.json. This module decides
 * which simulations produce each cell; the file supplies the measured value,
 * the tolerance and, for application rows, the kernel clock.
 */
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hbmsim/workloads.hpp"

namespace hbmsim {

struct ReferenceCell {
  std::string id;
  std::string profile;
  std::string unit;
  double measured = 0.0;
  /// Relative tolerance; exclusive with `range`.
  std::optional<double> tolerance;
  /// Inclusive acceptance interval in `unit`.
  std::optional<std::pair<double, double>> range;
  std::optional<double> kernel_clock_mhz;
  std::string source;

  bool accepts(double simulated) const;
};

struct CellResult {
  ReferenceCell ref;
  double simulated = 0.0;
  /// (simulated - measured) / measured.
  double rel_error = 0.0;
  bool pass = false;
};

struct Reproduction {
  std::string table;
  std::vector<CellResult> cells;
  /// Every simulation behind the cells, in run order.
  std::vector<BandwidthReport> runs;

  /// Conjunction of the per-cell checks.
  bool pass() const;
};

struct ReproduceOptions {
  std::uint64_t bytes_per_pc = 4 * kMiB;
  unsigned parallelism = 1;
  /// Empty means default_reference_path().
  std::filesystem::path reference;
};

/// t2, t3, t4, t5, t7, t8.
const std::vector<std::string>& table_ids();
bool is_table_id(const std::string& id);

/// HBMSIM_DATA_DIR/paper_reference.json, falling back to the source tree.
std::filesystem::path default_reference_path();

/// Cells of one table. Throws ConfigError on a malformed file or unknown id.
std::vector<ReferenceCell> load_reference(const std::filesystem::path& file, const std::string& table);

/// Runs the simulations behind `table` and scores each reference cell.
Reproduction reproduce(const std::string& table, const ReproduceOptions& opt = {});

/// table, id, profile, unit, simulated, measured, rel_error, tolerance, pass, source
void write_comparison_csv(std::ostream& os, const Reproduction& r);
nlohmann::json comparison_to_json(const Reproduction& r);
/// Fixed-width table for terminals.
void print_comparison(std::ostream& os, const Reproduction& r);

}  // namespace hbmsim
