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

// hbmsim command-line front end.
//
// Exit codes: 0 success, 1 a run failed its functional check or a reproduced
// cell is out of tolerance, 2 invalid input (config, profile, arguments).

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include "hbmsim/analytic.hpp"
#include "hbmsim/experiment.hpp"
#include "hbmsim/profile.hpp"
#include "hbmsim/report.hpp"
#include "hbmsim/reproduce.hpp"

namespace fs = std::filesystem;
using namespace hbmsim;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitInput = 2;

/// Relative paths land in HBMSIM_OUTPUT_DIR when it is set.
fs::path resolve_output(const fs::path& p) {
  if (p.is_absolute()) return p;
  return env_output_dir(fs::path()) / p;
}

unsigned pick_parallelism(int flag, unsigned fallback) {
  if (flag > 0) return static_cast<unsigned>(flag);
  return env_parallelism(fallback);
}

int cmd_run(const std::string& config, const std::string& out_flag, const std::string& format_flag, int jobs,
            bool quiet) {
  ExperimentConfig cfg = load_experiment(config);
  if (!format_flag.empty()) cfg.output.format = format_flag == "json" ? ReportFormat::json : ReportFormat::csv;
  const fs::path out = resolve_output(out_flag.empty() ? fs::path(cfg.output.path) : fs::path(out_flag));
  const unsigned par = pick_parallelism(jobs, cfg.parallelism);
  const auto specs = expand(cfg);
  if (!quiet) {
    std::cerr << "profile " << cfg.profile.name << ", " << specs.size() << " run(s), parallelism " << par << "\n";
    for (std::size_t i = 0; i < specs.size(); ++i) std::cerr << "  [" << i << "] " << describe(specs[i]) << "\n";
  }
  const auto reports = run_specs(cfg.profile, specs, par);
  write_reports(out, cfg.output.format, reports);
  int status = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (!reports[i].correct) {
      std::cerr << "run [" << i << "] " << describe(specs[i]) << ": functional check failed\n";
      status = kExitFail;
    }
  }
  if (!quiet) std::cerr << "wrote " << out.string() << "\n";
  return status;
}

int cmd_reproduce(const std::string& table, const std::string& out_dir, const std::string& format,
                  const std::string& reference, double mib, int jobs) {
  ReproduceOptions opt;
  opt.bytes_per_pc = static_cast<std::uint64_t>(mib * static_cast<double>(kMiB));
  opt.parallelism = pick_parallelism(jobs, std::max(1U, std::thread::hardware_concurrency()));
  if (!reference.empty()) opt.reference = reference;
  const Reproduction r = reproduce(table, opt);
  print_comparison(std::cout, r);

  const fs::path dir = out_dir.empty() ? env_output_dir(".") : resolve_output(out_dir);
  fs::create_directories(dir);
  const fs::path path = dir / ("reproduce_" + table + (format == "json" ? ".json" : ".csv"));
  std::ofstream os(path);
  if (format == "json")
    os << comparison_to_json(r).dump(2) << "\n";
  else
    write_comparison_csv(os, r);
  if (!os) throw ConfigError("cannot write '" + path.string() + "'");
  std::cout << "wrote " << path.string() << "\n";
  return r.pass() ? 0 : kExitFail;
}

int cmd_calibrate(const std::string& profile_ref, const std::string& out_flag, double mib, int jobs) {
  const PlatformProfile prof = load_profile(profile_ref);
  const auto specs = calibration_specs(prof, static_cast<std::uint64_t>(mib * static_cast<double>(kMiB)));
  const auto reports = run_specs(prof, specs, pick_parallelism(jobs, static_cast<unsigned>(specs.size())));
  for (const auto& r : reports)
    if (!r.correct) {
      std::cerr << r.workload << ": functional check failed\n";
      return kExitFail;
    }
  const AnalyticParams p = calibrate(reports);
  const nlohmann::json j = analytic_to_json(p);
  const fs::path out = resolve_output(out_flag.empty() ? fs::path(prof.name + "_params.json") : fs::path(out_flag));
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream os(out);
  os << j.dump(2) << "\n";
  if (!os) throw ConfigError("cannot write '" + out.string() + "'");
  std::cout << "bw_max " << format_real(p.bw_max / 1e9) << " GB/s, bw_str " << format_real(p.bw_str / 1e9)
            << " GB/s per PC, bw_mc " << format_real(p.bw_mc / 1e9) << " GB/s, lat_hbm " << format_real(p.lat_hbm.ns())
            << " ns, lat_pe " << format_real(p.lat_pe.ns()) << " ns\n";
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

int cmd_list_profiles(bool as_json) {
  if (as_json) {
    nlohmann::json all = nlohmann::json::array();
    for (const auto& n : builtin_profile_names()) all.push_back(profile_to_json(builtin_profile(n)));
    std::cout << all.dump(2) << "\n";
    return 0;
  }
  for (const auto& n : builtin_profile_names()) {
    const auto p = builtin_profile(n);
    std::cout << n << ": " << p.usable_pcs().size() << "/" << p.pc_count << " PCs usable, "
              << format_real(p.effective_pc_bw() / 1e9) << " GB/s per PC sequential, kernel clock <= "
              << format_real(p.kernel_clock_max / 1e6) << " MHz, " << p.master_data_width << "b masters\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transaction-level HBM memory subsystem simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the workloads of a JSON experiment config");
  std::string config, run_out, run_format;
  int run_jobs = 0;
  bool quiet = false;
  run->add_option("config", config, "Experiment config file")->required();
  run->add_option("-o,--output", run_out, "Report path (overrides the config)");
  run->add_option("--format", run_format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  run->add_option("-j,--jobs", run_jobs, "Parallel simulations (overrides HBMSIM_PARALLELISM)")
      ->check(CLI::Range(1, 1024));
  run->add_flag("-q,--quiet", quiet, "Do not log the expanded runs");

  auto* rep = app.add_subcommand("reproduce", "Compare a simulated table against reference measurements");
  std::string table, rep_out, rep_format = "csv", reference;
  double rep_mib = 4.0;
  int rep_jobs = 0;
  rep->add_option("table", table, "Table id")->required()->check(CLI::IsMember(table_ids()));
  rep->add_option("-o,--output-dir", rep_out, "Directory for the comparison file");
  rep->add_option("--format", rep_format, "Comparison format")->check(CLI::IsMember({"csv", "json"}));
  rep->add_option("--reference", reference, "Reference values file");
  rep->add_option("--mib-per-pc", rep_mib, "Working set per PC in MiB")->check(CLI::PositiveNumber);
  rep->add_option("-j,--jobs", rep_jobs, "Parallel simulations")->check(CLI::Range(1, 1024));

  auto* cal = app.add_subcommand("calibrate", "Extract analytic model parameters from microbenchmarks");
  std::string cal_profile = "u280", cal_out;
  double cal_mib = 4.0;
  int cal_jobs = 0;
  cal->add_option("-p,--profile", cal_profile, "Builtin profile name or profile JSON file");
  cal->add_option("-o,--output", cal_out, "Parameter file (default <profile>_params.json)");
  cal->add_option("--mib-per-pc", cal_mib, "Working set per PC in MiB")->check(CLI::PositiveNumber);
  cal->add_option("-j,--jobs", cal_jobs, "Parallel simulations")->check(CLI::Range(1, 1024));

  auto* lp = app.add_subcommand("list-profiles", "List the builtin platform profiles");
  bool lp_json = false;
  lp->add_flag("--json", lp_json, "Print the full profiles as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    if (*run) return cmd_run(config, run_out, run_format, run_jobs, quiet);
    if (*rep) return cmd_reproduce(table, rep_out, rep_format, reference, rep_mib, rep_jobs);
    if (*cal) return cmd_calibrate(cal_profile, cal_out, cal_mib, cal_jobs);
    if (*lp) return cmd_list_profiles(lp_json);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitInput;
}
