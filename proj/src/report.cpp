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

#include "hbmsim/report.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace hbmsim {

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {"workload",   "profile",    "pattern",          "blen",
                                                "pe_num",     "pc_num",     "kernel_clock_mhz", "bytes",
                                                "elapsed_ns", "eff_bw_gbs", "latency_ns",       "correctness"};
  return cols;
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<std::string> csv_cells(const BandwidthReport& r) {
  return {r.workload,
          r.profile,
          r.pattern,
          std::to_string(r.blen),
          std::to_string(r.pe_num),
          std::to_string(r.pc_num),
          format_real(r.kernel_clock / 1e6),
          std::to_string(r.bytes()),
          format_real(r.elapsed.ns()),
          format_real(r.eff_bw() / 1e9),
          r.latency_ns ? format_real(*r.latency_ns) : std::string(),
          r.correct ? "pass" : "fail"};
}

void write_csv(std::ostream& os, const std::vector<BandwidthReport>& reports) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : reports) {
    const auto cells = csv_cells(r);
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  }
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<std::map<std::string, std::string>> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("csv: missing header");
  const auto header = split_row(line);
  if (header != csv_columns()) throw ConfigError("csv: unexpected header '" + line + "'");
  std::vector<std::map<std::string, std::string>> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size())
      throw ConfigError("csv line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                        " cells, got " + std::to_string(cells.size()));
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < cells.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json report_to_json(const BandwidthReport& r) {
  nlohmann::json j;
  const auto cells = csv_cells(r);
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) j[cols[i]] = cells[i];
  // numeric columns as numbers in JSON, parsed back from the formatted cells
  for (const char* k : {"blen", "pe_num", "pc_num", "bytes"}) j[k] = std::stoull(j[k].get<std::string>());
  for (const char* k : {"kernel_clock_mhz", "elapsed_ns", "eff_bw_gbs"}) j[k] = std::stod(j[k].get<std::string>());
  if (r.latency_ns)
    j["latency_ns"] = std::stod(format_real(*r.latency_ns));
  else
    j["latency_ns"] = nullptr;
  j["arch"] = r.arch;
  j["data_width"] = r.data_width;
  j["bytes_read"] = r.bytes_read;
  j["bytes_written"] = r.bytes_written;
  j["per_pc_bytes"] = r.per_pc;
  if (r.lat_pe_ns) j["lat_pe_ns"] = *r.lat_pe_ns;
  if (r.lat_mem_ns) j["lat_mem_ns"] = *r.lat_mem_ns;
  if (!r.note.empty()) j["note"] = r.note;
  j["events"] = r.events;
  j["trace_hash"] = r.trace_hash;
  return j;
}

nlohmann::json reports_to_json(const std::vector<BandwidthReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(report_to_json(r));
  return nlohmann::json{{"columns", csv_columns()}, {"runs", arr}};
}

}  // namespace hbmsim
