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

#include "hbmsim/reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>

#include "hbmsim/experiment.hpp"
#include "hbmsim/report.hpp"

#ifndef HBMSIM_DATA_DIR
#define HBMSIM_DATA_DIR "data"
#endif

namespace hbmsim {

using nlohmann::json;

namespace {

using Values = std::map<std::string, double>;

/// Simulations for one table plus the reduction of their reports to cells.
struct Plan {
  std::vector<Job> jobs;
  std::function<Values(const std::vector<BandwidthReport>&)> score;
};

double gbs(const BandwidthReport& r) { return r.eff_bw() / 1e9; }

const ReferenceCell& find_cell(const std::vector<ReferenceCell>& cells, const std::string& id) {
  for (const auto& c : cells)
    if (c.id == id) return c;
  throw ConfigError("reference file has no cell '" + id + "'");
}

/// Kernel clock of a row in Hz; 0 selects the profile maximum.
double row_clock(const std::vector<ReferenceCell>& cells, const std::string& id) {
  const auto& c = find_cell(cells, id);
  return c.kernel_clock_mhz ? *c.kernel_clock_mhz * 1e6 : 0.0;
}

WorkloadSpec base_spec(WorkloadKind k, const ReproduceOptions& opt) {
  WorkloadSpec s;
  s.kind = k;
  s.bytes_per_pc = opt.bytes_per_pc;
  return s;
}

const char* mode_tag(CopyMode m) { return to_string(m); }

Plan plan_t2(const std::vector<ReferenceCell>&, const ReproduceOptions& opt) {
  Plan p;
  const auto u280 = builtin_profile("u280");
  const std::uint64_t strides[] = {256, 1024, 4096};
  for (MasterFlavor m : {MasterFlavor::hls, MasterFlavor::rtl})
    for (std::uint64_t st : strides) {
      WorkloadSpec s = base_spec(WorkloadKind::strided, opt);
      s.master = m;
      s.stride = st;
      p.jobs.push_back({u280, s});
    }
  const unsigned widths[] = {128, 256, 512};
  for (unsigned w : widths) {
    WorkloadSpec s = base_spec(WorkloadKind::bitwidth_sweep, opt);
    s.mode = CopyMode::read_only;
    s.data_width = w;
    p.jobs.push_back({u280, s});
  }
  std::vector<double> grid;
  for (int mhz = 50; mhz <= 300; mhz += 25) grid.push_back(mhz * 1e6);
  const CopyMode modes[] = {CopyMode::read_only, CopyMode::write_only, CopyMode::read_write};
  for (CopyMode m : modes)
    for (double f : grid) {
      WorkloadSpec s = base_spec(WorkloadKind::freq_sweep, opt);
      s.mode = m;
      s.kernel_clock = f;
      p.jobs.push_back({u280, s});
    }
  const std::size_t n_grid = grid.size();
  p.score = [n_grid](const std::vector<BandwidthReport>& r) {
    Values v;
    std::size_t i = 0;
    for (const char* m : {"hls", "rtl"})
      for (int st : {256, 1024, 4096}) v["strided_" + std::string(m) + "_" + std::to_string(st)] = gbs(r[i++]);
    for (int w : {128, 256, 512}) v["width_" + std::to_string(w)] = gbs(r[i++]);
    for (CopyMode m : {CopyMode::read_only, CopyMode::write_only, CopyMode::read_write}) {
      const std::vector<BandwidthReport> sweep(r.begin() + static_cast<std::ptrdiff_t>(i),
                                               r.begin() + static_cast<std::ptrdiff_t>(i + n_grid));
      i += n_grid;
      v["knee_" + std::string(mode_tag(m)) + "_mhz"] = saturation_knee(sweep) / 1e6;
      if (m == CopyMode::read_only)
        for (const auto& x : sweep) {
          const long mhz = std::lround(x.kernel_clock / 1e6);
          if (mhz == 150 || mhz == 200 || mhz == 250) v["freq_" + std::to_string(mhz)] = gbs(x);
        }
    }
    return v;
  };
  return p;
}

Plan plan_t3(const std::vector<ReferenceCell>&, const ReproduceOptions& opt) {
  Plan p;
  std::vector<std::string> ids;
  for (const char* name : {"u280", "u50", "s10mx"}) {
    const auto prof = builtin_profile(name);
    const unsigned all = static_cast<unsigned>(prof.usable_pcs().size());
    for (unsigned n : {all, 1U})
      for (CopyMode m : {CopyMode::read_write, CopyMode::read_only, CopyMode::write_only}) {
        WorkloadSpec s = base_spec(WorkloadKind::seq_copy, opt);
        s.mode = m;
        s.pc_num = n;
        p.jobs.push_back({prof, s});
        ids.push_back(std::string(name) + "_" + std::to_string(n) + "pc_" + mode_tag(m));
      }
  }
  p.score = [ids](const std::vector<BandwidthReport>& r) {
    Values v;
    for (std::size_t i = 0; i < ids.size(); ++i) v[ids[i]] = gbs(r[i]);
    return v;
  };
  return p;
}

Plan plan_t4(const std::vector<ReferenceCell>& cells, const ReproduceOptions& opt) {
  Plan p;
  std::vector<std::string> ids;
  for (const char* name : {"u280", "s10mx"}) {
    const auto prof = builtin_profile(name);
    for (unsigned n : {1U, 2U, 4U, 8U}) {
      const std::string id = std::string(name) + "_" + std::to_string(n) + "x" + std::to_string(n);
      WorkloadSpec s = base_spec(WorkloadKind::unicast, opt);
      s.pattern = n;
      s.kernel_clock = row_clock(cells, id);
      p.jobs.push_back({prof, s});
      ids.push_back(id);
    }
  }
  p.score = [ids](const std::vector<BandwidthReport>& r) {
    Values v;
    for (std::size_t i = 0; i < ids.size(); ++i) v[ids[i]] = gbs(r[i]);
    return v;
  };
  return p;
}

Plan plan_t5(const std::vector<ReferenceCell>&, const ReproduceOptions& opt) {
  Plan p;
  const char* names[] = {"u280", "s10mx"};
  for (const char* name : names) p.jobs.push_back({builtin_profile(name), base_spec(WorkloadKind::pointer_chase, opt)});
  p.score = [names](const std::vector<BandwidthReport>& r) {
    Values v;
    for (std::size_t i = 0; i < 2; ++i) {
      const std::string n = names[i];
      v[n + "_total_ns"] = r[i].latency_ns.value_or(0.0);
      v[n + "_pe_ns"] = r[i].lat_pe_ns.value_or(0.0);
      v[n + "_mem_ns"] = r[i].lat_mem_ns.value_or(0.0);
    }
    return v;
  };
  return p;
}

Plan plan_t7(const std::vector<ReferenceCell>& cells, const ReproduceOptions& opt) {
  Plan p;
  const auto u280 = builtin_profile("u280");
  std::vector<std::string> ids;
  for (auto [app, kind] : {std::pair{"bucket", WorkloadKind::bucket_sort}, std::pair{"radix", WorkloadKind::radix_sort}})
    for (unsigned blen : {0U, 16U, 32U, 64U}) {
      const std::string id = std::string(app) + (blen ? "_bica_blen" + std::to_string(blen) : "_baseline");
      WorkloadSpec s = base_spec(kind, opt);
      s.arch = blen ? Arch::bica : Arch::baseline;
      s.blen = blen ? blen : 1;
      s.kernel_clock = row_clock(cells, id);
      p.jobs.push_back({u280, s});
      ids.push_back(id);
    }
  p.score = [ids](const std::vector<BandwidthReport>& r) {
    Values v;
    for (std::size_t i = 0; i < ids.size(); ++i) v[ids[i]] = gbs(r[i]);
    v["average_factor"] = (v["bucket_bica_blen64"] / v["bucket_baseline"] + v["radix_bica_blen64"] / v["radix_baseline"]) / 2;
    return v;
  };
  return p;
}

Plan plan_t8(const std::vector<ReferenceCell>& cells, const ReproduceOptions& opt) {
  Plan p;
  const auto u280 = builtin_profile("u280");
  // 28 PCs, the count that still routes once search logic is added
  constexpr unsigned kPcs = 28;
  struct App {
    const char* name;
    WorkloadKind kind;
    std::vector<unsigned> pes;
  };
  const std::vector<App> apps = {{"binary_search", WorkloadKind::binary_search, {2, 4, 8, 16}},
                                 {"dfs", WorkloadKind::dfs, {2, 4, 8}}};
  std::vector<std::pair<std::string, std::size_t>> ratio_of;  // id, baseline index
  for (const auto& a : apps) {
    const std::size_t base = p.jobs.size();
    WorkloadSpec s = base_spec(a.kind, opt);
    s.pc_num = kPcs;
    p.jobs.push_back({u280, s});
    ratio_of.emplace_back(std::string(), base);
    for (unsigned pe : a.pes) {
      const std::string id = std::string(a.name) + "_pe" + std::to_string(pe) + "_ratio";
      WorkloadSpec t = s;
      t.arch = Arch::bipa;
      t.pes_per_pc = pe;
      t.kernel_clock = row_clock(cells, id);
      p.jobs.push_back({u280, t});
      ratio_of.emplace_back(id, base);
    }
  }
  p.score = [ratio_of](const std::vector<BandwidthReport>& r) {
    Values v;
    for (std::size_t i = 0; i < ratio_of.size(); ++i)
      if (!ratio_of[i].first.empty()) v[ratio_of[i].first] = r[i].eff_bw() / r[ratio_of[i].second].eff_bw();
    v["average_factor"] = (v["binary_search_pe16_ratio"] + v["dfs_pe8_ratio"]) / 2;
    return v;
  };
  return p;
}

Plan make_plan(const std::string& table, const std::vector<ReferenceCell>& cells, const ReproduceOptions& opt) {
  if (table == "t2") return plan_t2(cells, opt);
  if (table == "t3") return plan_t3(cells, opt);
  if (table == "t4") return plan_t4(cells, opt);
  if (table == "t5") return plan_t5(cells, opt);
  if (table == "t7") return plan_t7(cells, opt);
  if (table == "t8") return plan_t8(cells, opt);
  throw ConfigError("unknown table '" + table + "'");
}

ReferenceCell cell_from_json(const json& j, const std::string& where) {
  ReferenceCell c;
  try {
    c.id = j.at("id").get<std::string>();
    c.profile = j.at("profile").get<std::string>();
    c.unit = j.at("unit").get<std::string>();
    c.measured = j.at("measured").get<double>();
    c.source = j.at("source").get<std::string>();
    if (j.contains("tolerance")) c.tolerance = j["tolerance"].get<double>();
    if (j.contains("range")) c.range = std::make_pair(j["range"].at(0).get<double>(), j["range"].at(1).get<double>());
    if (j.contains("kernel_clock_mhz")) c.kernel_clock_mhz = j["kernel_clock_mhz"].get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  if (c.tolerance.has_value() == c.range.has_value())
    throw ConfigError(where + ": exactly one of tolerance and range is required");
  if (!(c.measured != 0.0)) throw ConfigError(where + ": measured value must be non-zero");
  return c;
}

}  // namespace

bool ReferenceCell::accepts(double simulated) const {
  if (!std::isfinite(simulated)) return false;
  if (range) return simulated >= range->first && simulated <= range->second;
  return std::abs(simulated - measured) <= *tolerance * std::abs(measured);
}

bool Reproduction::pass() const {
  return std::all_of(cells.begin(), cells.end(), [](const CellResult& c) { return c.pass; });
}

const std::vector<std::string>& table_ids() {
  static const std::vector<std::string> ids = {"t2", "t3", "t4", "t5", "t7", "t8"};
  return ids;
}

bool is_table_id(const std::string& id) {
  const auto& ids = table_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

std::filesystem::path default_reference_path() {
  if (const char* d = std::getenv("HBMSIM_DATA_DIR"); d && *d) return std::filesystem::path(d) / "paper_reference.json";
  return std::filesystem::path(HBMSIM_DATA_DIR) / "paper_reference.json";
}

std::vector<ReferenceCell> load_reference(const std::filesystem::path& file, const std::string& table) {
  if (!is_table_id(table)) throw ConfigError("unknown table '" + table + "'");
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open reference file '" + file.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  if (!j.contains("tables") || !j["tables"].contains(table))
    throw ConfigError(file.string() + ": no cells for table '" + table + "'");
  std::vector<ReferenceCell> cells;
  const json& arr = j["tables"][table];
  for (std::size_t i = 0; i < arr.size(); ++i)
    cells.push_back(cell_from_json(arr[i], table + "[" + std::to_string(i) + "]"));
  return cells;
}

Reproduction reproduce(const std::string& table, const ReproduceOptions& opt) {
  const auto file = opt.reference.empty() ? default_reference_path() : opt.reference;
  const auto cells = load_reference(file, table);
  Plan plan = make_plan(table, cells, opt);
  Reproduction out;
  out.table = table;
  out.runs = run_jobs(plan.jobs, opt.parallelism);
  const Values v = plan.score(out.runs);
  const bool all_correct =
      std::all_of(out.runs.begin(), out.runs.end(), [](const BandwidthReport& r) { return r.correct; });
  for (const auto& c : cells) {
    auto it = v.find(c.id);
    if (it == v.end()) throw ConfigError("reproduce " + table + ": no simulation produces cell '" + c.id + "'");
    CellResult cr;
    cr.ref = c;
    cr.simulated = it->second;
    cr.rel_error = (cr.simulated - c.measured) / c.measured;
    // a failed functional check voids every measurement of the table
    cr.pass = all_correct && c.accepts(cr.simulated);
    out.cells.push_back(std::move(cr));
  }
  return out;
}

namespace {

std::string tolerance_text(const ReferenceCell& c) {
  if (c.range) return "[" + format_real(c.range->first) + "," + format_real(c.range->second) + "]";
  return "+-" + format_real(*c.tolerance * 100) + "%";
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

}  // namespace

void write_comparison_csv(std::ostream& os, const Reproduction& r) {
  os << "table,id,profile,unit,simulated,measured,rel_error,tolerance,pass,source\n";
  for (const auto& c : r.cells)
    os << r.table << ',' << c.ref.id << ',' << c.ref.profile << ',' << c.ref.unit << ',' << format_real(c.simulated)
       << ',' << format_real(c.ref.measured) << ',' << format_real(c.rel_error) << ',' << tolerance_text(c.ref) << ','
       << (c.pass ? "pass" : "fail") << ',' << csv_quote(c.ref.source) << '\n';
}

json comparison_to_json(const Reproduction& r) {
  json cells = json::array();
  for (const auto& c : r.cells) {
    json j{{"id", c.ref.id},
           {"profile", c.ref.profile},
           {"unit", c.ref.unit},
           {"simulated", c.simulated},
           {"measured", c.ref.measured},
           {"rel_error", c.rel_error},
           {"pass", c.pass},
           {"source", c.ref.source}};
    if (c.ref.tolerance) j["tolerance"] = *c.ref.tolerance;
    if (c.ref.range) j["range"] = {c.ref.range->first, c.ref.range->second};
    cells.push_back(std::move(j));
  }
  return json{{"table", r.table}, {"pass", r.pass()}, {"cells", cells}, {"runs", reports_to_json(r.runs)["runs"]}};
}

void print_comparison(std::ostream& os, const Reproduction& r) {
  char line[256];
  std::snprintf(line, sizeof line, "%-28s %-6s %12s %12s %9s %12s  %s\n", "cell", "unit", "simulated", "measured",
                "rel_err", "accept", "result");
  os << line;
  for (const auto& c : r.cells) {
    std::snprintf(line, sizeof line, "%-28s %-6s %12.4g %12.4g %+8.1f%% %12s  %s\n", c.ref.id.c_str(),
                  c.ref.unit.c_str(), c.simulated, c.ref.measured, c.rel_error * 100, tolerance_text(c.ref).c_str(),
                  c.pass ? "pass" : "FAIL");
    os << line;
  }
  std::size_t ok = 0;
  for (const auto& c : r.cells) ok += c.pass;
  os << r.table << ": " << ok << "/" << r.cells.size() << " cells within tolerance\n";
}

}  // namespace hbmsim
