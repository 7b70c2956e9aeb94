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


// Python bindings. Everything crosses the boundary as JSON text; the Python
// package wraps these functions and decodes the results.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "hbmsim/analytic.hpp"
#include "hbmsim/experiment.hpp"
#include "hbmsim/report.hpp"
#include "hbmsim/reproduce.hpp"

namespace py = pybind11;
using namespace hbmsim;

namespace {

PlatformProfile profile_arg(const std::string& ref_or_json) {
  if (!ref_or_json.empty() && ref_or_json.front() == '{') return profile_from_json(nlohmann::json::parse(ref_or_json));
  return load_profile(ref_or_json);
}

std::string run_workload_json(const std::string& profile, const std::string& spec) {
  const PlatformProfile p = profile_arg(profile);
  const WorkloadSpec s = workload_from_json(nlohmann::json::parse(spec));
  BandwidthReport r;
  {
    py::gil_scoped_release release;
    r = run_workload(p, s);
  }
  return report_to_json(r).dump();
}

std::string run_config_json(const std::string& path, unsigned parallelism) {
  const ExperimentConfig cfg = load_experiment(path);
  const auto specs = expand(cfg);
  std::vector<BandwidthReport> reports;
  {
    py::gil_scoped_release release;
    reports = run_specs(cfg.profile, specs, parallelism ? parallelism : cfg.parallelism);
  }
  return reports_to_json(reports).dump();
}

std::string reproduce_json(const std::string& table, double mib_per_pc, unsigned parallelism,
                           const std::string& reference) {
  ReproduceOptions opt;
  opt.bytes_per_pc = static_cast<std::uint64_t>(mib_per_pc * static_cast<double>(kMiB));
  opt.parallelism = parallelism ? parallelism : 1;
  if (!reference.empty()) opt.reference = reference;
  Reproduction r;
  {
    py::gil_scoped_release release;
    r = reproduce(table, opt);
  }
  return comparison_to_json(r).dump();
}

std::string calibrate_json(const std::string& profile, double mib_per_pc) {
  const PlatformProfile p = profile_arg(profile);
  const auto specs = calibration_specs(p, static_cast<std::uint64_t>(mib_per_pc * static_cast<double>(kMiB)));
  std::vector<BandwidthReport> reports;
  {
    py::gil_scoped_release release;
    reports = run_specs(p, specs, 1);
  }
  return analytic_to_json(calibrate(reports)).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Transaction-level HBM memory subsystem simulator";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("builtin_profile_names", &builtin_profile_names);
  m.def(
      "profile_json", [](const std::string& ref) { return profile_to_json(profile_arg(ref)).dump(); },
      py::arg("profile"));
  m.def("run_workload_json", &run_workload_json, py::arg("profile"), py::arg("spec"));
  m.def("run_config_json", &run_config_json, py::arg("path"), py::arg("parallelism") = 0);
  m.def("reproduce_json", &reproduce_json, py::arg("table"), py::arg("mib_per_pc") = 4.0,
        py::arg("parallelism") = 1, py::arg("reference") = "");
  m.def("calibrate_json", &calibrate_json, py::arg("profile"), py::arg("mib_per_pc") = 4.0);
  m.def("table_ids", &table_ids);
  m.def("csv_columns", &csv_columns);
  m.attr("__version__") = HBMSIM_VERSION;
}
