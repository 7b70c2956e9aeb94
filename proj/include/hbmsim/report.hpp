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
 * @file report.hpp
 * @brief CSV and JSON serialization of run reports.
 *
 * Columns, in order: workload, profile, pattern, blen, pe_num, pc_num,
 * kernel_clock_mhz, bytes, elapsed_ns, eff_bw_gbs, latency_ns, correctness.
 * GB/s is 1e9 bytes/s. Real-valued cells carry 6 significant digits;
 * latency_ns is empty for runs without a dependent-access latency.
 */
#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hbmsim/workloads.hpp"

namespace hbmsim {

const std::vector<std::string>& csv_columns();

/// %.6g formatting used for every real-valued cell.
std::string format_real(double v);

/// One CSV row (no trailing newline), cells in csv_columns() order.
std::vector<std::string> csv_cells(const BandwidthReport& r);

void write_csv(std::ostream& os, const std::vector<BandwidthReport>& reports);

/// Parses CSV text written by write_csv into column -> cell maps.
/// Throws ConfigError on a malformed header or ragged row.
std::vector<std::map<std::string, std::string>> read_csv(std::istream& is);

/// CSV fields plus per-PC bytes and the run's diagnostics.
nlohmann::json report_to_json(const BandwidthReport& r);
nlohmann::json reports_to_json(const std::vector<BandwidthReport>& reports);

}  // namespace hbmsim
