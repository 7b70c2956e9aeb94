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


// Acceptance driver: one PASS/FAIL line per criterion, with the cells or
// checks behind it. Exit status is 0 when the harness ran to the end (reds
// included) and 2 on a harness error; --strict also exits 1 on any red.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hbmsim/analytic.hpp"
#include "hbmsim/experiment.hpp"
#include "hbmsim/reproduce.hpp"
#include "hbmsim/system.hpp"

using namespace hbmsim;

namespace {

struct Check {
  std::string what;
  bool pass = false;
};

struct Criterion {
  int number = 0;
  std::string title;
  std::vector<Check> lines;

  bool pass() const {
    return !lines.empty() && std::all_of(lines.begin(), lines.end(), [](const Check& l) { return l.pass; });
  }
};

std::string plain(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string fmt(double v, int prec = 3) {
  std::ostringstream os;
  os << std::setprecision(prec) << std::fixed << v;
  return os.str();
}

/// Reproductions are shared between criteria, so each table runs once.
class Tables {
 public:
  explicit Tables(ReproduceOptions opt) : opt_(std::move(opt)) {}

  const Reproduction& get(const std::string& id) {
    auto it = cache_.find(id);
    if (it == cache_.end()) {
      std::cerr << "reproducing " << id << "\n";
      it = cache_.emplace(id, reproduce(id, opt_)).first;
    }
    return it->second;
  }

 private:
  ReproduceOptions opt_;
  std::map<std::string, Reproduction> cache_;
};

Check cell_line(Tables& t, const std::string& table, const std::string& id) {
  for (const auto& c : t.get(table).cells) {
    if (c.ref.id != id) continue;
    std::string accept = c.ref.range ? "[" + plain(c.ref.range->first) + ", " + plain(c.ref.range->second) + "]"
                                     : "+-" + fmt(*c.ref.tolerance * 100, 0) + "%";
    return {table + " " + id + ": " + fmt(c.simulated) + " " + c.ref.unit + " vs " + plain(c.ref.measured) + " " + accept,
            c.pass};
  }
  throw std::runtime_error("no reference cell " + table + "/" + id);
}

Criterion from_cells(int n, std::string title, Tables& t, const std::string& table,
                     const std::vector<std::string>& ids) {
  Criterion c{n, std::move(title), {}};
  for (const auto& id : ids) c.lines.push_back(cell_line(t, table, id));
  return c;
}

/// Completion time of one isolated read burst on an idealized PC.
SimTime isolated_burst(const PlatformProfile& p, unsigned blen) {
  HbmSystem sys(p);
  BundleBinding b;
  b.read_pes = {0};
  b.target_pcs = {0};
  AxiMaster& m = sys.add_master(b, AxiMasterProfile{1, 1, 256, BurstInference::automatic},
                                ClockDomain("kernel", p.kernel_clock_max));
  MemRequest r;
  r.id = sys.next_request_id();
  r.burst_len = blen;
  SimTime done{};
  m.submit(r, {}, [&done](const MemRequest&, std::vector<Line>&&, SimTime t) { done = t; });
  sys.engine().run();
  return done;
}

Criterion analytic(Tables& t, const AnalyticParams& cal) {
  Criterion c{9, "analytic cross-validation", {}};

  // burst time, t_rc = 0, fast kernel so only the slave side is visible
  PlatformProfile ideal = builtin_profile("u280");
  ideal.per_pc_efficiency = 1.0;
  ideal.t_rc = SimTime{};
  ideal.t_page_miss = SimTime{};
  ideal.crossbar.hop_latency = SimTime{};
  ideal.kernel_clock_max = ideal.slave_clock;
  const SimTime slave_cycle = ideal.slave_domain().period();
  for (double lat : {0.0, 100.0}) {
    ideal.lat_hbm = SimTime::from_ns(lat);
    for (unsigned blen : {1U, 16U, 32U, 64U}) {
      const SimTime sim = isolated_burst(ideal, blen);
      const SimTime eq = t_bur(blen, 512, ideal.ideal_pc_bw(), ideal.lat_hbm);
      const SimTime diff = sim > eq ? sim - eq : eq - sim;
      c.lines.push_back({"burst time BLEN " + std::to_string(blen) + ", LAT " + fmt(lat, 0) + " ns: sim " +
                             fmt(sim.ns()) + " ns, closed form " + fmt(eq.ns()) + " ns",
                         diff <= slave_cycle});
    }
  }

  // batched bursts: the closed form must not claim more than the simulation
  for (const auto& r : t.get("t7").runs) {
    if (r.arch != "bica") continue;
    const unsigned bucket_pcs = r.pc_num / 2;  // half the PCs receive bursts
    const double eq = bica_bw(bucket_pcs, r.blen, cal, cal.lat_hbm);
    c.lines.push_back({"BICA " + r.workload + " BLEN " + std::to_string(r.blen) + ": closed form " +
                           fmt(eq / 1e9) + " <= 1.05 x sim " + fmt(r.eff_bw() / 1e9) + " GB/s",
                       eq <= 1.05 * r.eff_bw()});
  }

  // shared-PC arbitration against the BIPA runs
  for (const auto& r : t.get("t8").runs) {
    if (r.arch != "bipa") continue;
    const double eq = bipa_bw(r.pc_num, r.pe_num, cal.at_clock(r.kernel_clock), BipaForm::time_shared);
    const double rel = (eq - r.eff_bw()) / r.eff_bw();
    c.lines.push_back({"BIPA " + r.workload + " PE " + std::to_string(r.pe_num) + ": closed form " +
                           fmt(eq / 1e9) + " vs sim " + fmt(r.eff_bw() / 1e9) + " GB/s (" + fmt(rel * 100, 1) +
                           "%, +-20%)",
                       std::abs(rel) <= 0.20});
  }
  return c;
}

Criterion properties() {
  Criterion c{10, "property suite", {}};
  const std::string cmd = std::string("\"") + HBMSIM_TESTS_PATH +
                          "\" --test-suite=properties,arbitrators --no-intro --minimal 1>&2";
  std::cerr << "running " << cmd << "\n";
  const int rc = std::system(cmd.c_str());
  c.lines.push_back({"properties and arbitrator invariants (exit " + std::to_string(rc) + ")", rc == 0});
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--strict") == 0) {
      strict = true;
    } else {
      std::cerr << "usage: hbmsim_acceptance [--strict]\n";
      return 2;
    }
  }

  try {
    ReproduceOptions opt;
    opt.parallelism = env_parallelism(std::max(1U, std::thread::hardware_concurrency()));
    Tables t(opt);

    std::vector<Criterion> all;
    all.push_back(from_cells(1, "sequential", t, "t3",
                             {"u280_1pc_read_only", "u280_30pc_read_write", "s10mx_1pc_write_only"}));
    all.push_back(from_cells(2, "strided", t, "t2",
                             {"strided_hls_256", "strided_hls_1024", "strided_hls_4096", "strided_rtl_4096",
                              "strided_rtl_256", "strided_rtl_1024"}));
    all.push_back(from_cells(3, "bitwidth", t, "t2", {"width_128", "width_256", "width_512"}));
    all.push_back(from_cells(4, "frequency knee", t, "t2", {"knee_read_only_mhz", "knee_read_write_mhz"}));
    all.push_back(from_cells(5, "unicast", t, "t4", {"u280_1x1", "u280_2x2", "u280_4x4", "u280_8x8", "s10mx_8x8"}));
    all.push_back(from_cells(6, "latency", t, "t5", {"u280_total_ns", "s10mx_total_ns"}));
    all.push_back(from_cells(7, "BICA", t, "t7",
                             {"bucket_baseline", "bucket_bica_blen16", "bucket_bica_blen32", "bucket_bica_blen64",
                              "radix_baseline", "radix_bica_blen16", "radix_bica_blen32", "radix_bica_blen64",
                              "average_factor"}));
    all.push_back(from_cells(8, "BIPA", t, "t8",
                             {"binary_search_pe2_ratio", "binary_search_pe4_ratio", "binary_search_pe8_ratio",
                              "binary_search_pe16_ratio", "dfs_pe2_ratio", "dfs_pe4_ratio", "dfs_pe8_ratio",
                              "average_factor"}));

    const PlatformProfile u280 = builtin_profile("u280");
    std::cerr << "calibrating u280\n";
    const auto cal_runs = run_specs(u280, calibration_specs(u280), opt.parallelism);
    all.push_back(analytic(t, calibrate(cal_runs)));
    all.push_back(properties());

    int red = 0;
    std::cout << "\n";
    for (const auto& c : all) {
      std::cout << (c.pass() ? "PASS" : "FAIL") << "  criterion " << c.number << " (" << c.title << ")\n";
      for (const auto& l : c.lines) std::cout << "        " << (l.pass ? "ok  " : "red ") << l.what << "\n";
      red += c.pass() ? 0 : 1;
    }
    std::cout << "\n" << (all.size() - red) << "/" << all.size() << " criteria pass\n";
    return strict && red > 0 ? 1 : 0;
  } catch (const std::exception& e) {
    std::cerr << "acceptance harness error: " << e.what() << "\n";
    return 2;
  }
}
