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

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hbmsim/experiment.hpp"
#include "hbmsim/report.hpp"

using namespace hbmsim;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("JSON syntax errors carry line and column") {
    const fs::path p = write_temp("hbmsim_syntax.json", "{\n  \"workloads\": [\n    {\"kind\": \"strided\",}\n  ]\n}\n");
    CHECK_THROWS_WITH_AS(load_experiment(p), doctest::Contains("hbmsim_syntax.json:3:"), ConfigError);
    fs::remove(p);
  }

  TEST_CASE("field errors name the field") {
    CHECK_THROWS_WITH_AS(parse_experiment(json::parse(R"({"workloads": [{"kind": "strided"}, {"kind": "seq_copy", "blen": "x"}]})")),
                         doctest::Contains("workloads[1].blen"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_experiment(json::parse(R"({"workloads": [{"kind": "strided", "strde": 64}]})")),
                         doctest::Contains("workloads[0].strde: unknown field"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_experiment(json::parse(R"({"workloads": [{"mode": "read_only"}]})")),
                         doctest::Contains("workloads[0].kind: required"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_experiment(json::parse(R"({"workloads": [], "output": {"format": "xml"}})")),
                         doctest::Contains("output.format"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_experiment(json::parse(R"({"workloads": [{"kind": "strided", "stride": 100}]})")),
                         doctest::Contains("power of two"), ConfigError);
    CHECK_THROWS_AS(parse_experiment(json::parse(R"({"profile": "vu9p", "workloads": []})")), ConfigError);
    CHECK_THROWS_AS(parse_experiment(json::parse(R"({"workloads": [], "parallelism": 0})")), ConfigError);
  }

  TEST_CASE("two read PEs on one bundle cite the rule") {
    const auto bad_binding = json::parse(R"({"workloads": [], "bindings": [{"master": 0, "read_pes": [0, 1], "target_pcs": [0]}]})");
    CHECK_THROWS_WITH_AS(parse_experiment(bad_binding), doctest::Contains("only one read PE and one write PE"),
                         ConfigError);
    const auto shared = json::parse(R"({"workloads": [{"kind": "binary_search", "pes_per_pc": 4}]})");
    CHECK_THROWS_WITH_AS(parse_experiment(shared), doctest::Contains("only one read PE and one write PE"),
                         ConfigError);
    // An arbiter makes sharing legal; so does a profile without the rule.
    CHECK_NOTHROW(parse_experiment(json::parse(R"({"workloads": [{"kind": "binary_search", "arch": "bipa", "pes_per_pc": 4}]})")));
    CHECK_NOTHROW(parse_experiment(json::parse(R"({"profile": "s10mx", "workloads": [{"kind": "dfs", "pes_per_pc": 4}]})")));
  }

  TEST_CASE("sweep expansion is a deterministic cartesian product") {
    const auto j = json::parse(R"({
      "seed": 40,
      "workloads": [
        {"kind": "bucket_sort", "arch": "bica", "sweeps": {"blen": [16, 128], "freq_mhz": [200, 250]}},
        {"kind": "strided", "seed": 3}
      ],
      "sweeps": {"stride": [256, 4096]}
    })");
    const ExperimentConfig cfg = parse_experiment(j);
    const auto specs = expand(cfg);
    REQUIRE(specs.size() == 6);
    CHECK(specs[0].blen == 16);
    CHECK(specs[0].kernel_clock == doctest::Approx(200e6));
    CHECK(specs[1].blen == 16);
    CHECK(specs[1].kernel_clock == doctest::Approx(250e6));
    CHECK(specs[2].blen == 128);
    CHECK(specs[2].fifo_depth >= 128);
    CHECK(specs[0].seed == 40);
    CHECK(specs[4].stride == 256);
    CHECK(specs[5].stride == 4096);
    CHECK(specs[5].seed == 3);

    const auto again = expand(parse_experiment(j));
    for (std::size_t i = 0; i < specs.size(); ++i) {
      CHECK(describe(specs[i]) == describe(again[i]));
      CHECK(workload_to_json(specs[i]) == workload_to_json(again[i]));
    }
  }

  TEST_CASE("workload JSON round trip") {
    const auto j = json::parse(R"({"kind": "radix_sort", "arch": "bica", "blen": 32, "fifo_depth": 64,
                                   "kernel_clock_mhz": 265, "key_bits": 12, "bytes_per_pc": 262144})");
    const WorkloadSpec s = workload_from_json(j);
    CHECK(s.kind == WorkloadKind::radix_sort);
    CHECK(s.kernel_clock == doctest::Approx(265e6));
    const WorkloadSpec back = workload_from_json(workload_to_json(s));
    CHECK(workload_to_json(back) == workload_to_json(s));
    CHECK_THROWS_AS(workload_from_json(json::parse(R"({"kind": "strided", "kernel_clock": 1e8, "kernel_clock_mhz": 100})")),
                    ConfigError);
  }

  TEST_CASE("empty workload list writes a header-only report") {
    const ExperimentConfig cfg = parse_experiment(json::parse(R"({"workloads": []})"));
    CHECK(expand(cfg).empty());
    const fs::path out = fs::temp_directory_path() / "hbmsim_empty" / "r.csv";
    write_reports(out, ReportFormat::csv, run_specs(cfg.profile, expand(cfg), 2));
    std::ifstream in(out);
    std::stringstream text;
    text << in.rdbuf();
    const std::string body = text.str();
    CHECK(std::count(body.begin(), body.end(), '\n') == 1);
    fs::remove_all(out.parent_path());
  }

  TEST_CASE("parallel runs match serial runs in order") {
    const auto j = json::parse(R"({"workloads": [{"kind": "strided", "pc_num": 2, "bytes_per_pc": 65536,
                                                 "sweeps": {"stride": [64, 256, 1024, 4096]}}]})");
    const ExperimentConfig cfg = parse_experiment(j);
    const auto serial = run_specs(cfg.profile, expand(cfg), 1);
    const auto par = run_specs(cfg.profile, expand(cfg), 3);
    REQUIRE(serial.size() == 4);
    for (std::size_t i = 0; i < serial.size(); ++i) {
      CHECK(serial[i].pattern == par[i].pattern);
      CHECK(serial[i].trace_hash == par[i].trace_hash);
      CHECK(serial[i].elapsed == par[i].elapsed);
    }
  }

  TEST_CASE("a failing job surfaces its error") {
    std::vector<Job> jobs(2);
    jobs[0].profile = builtin_profile("u280");
    jobs[0].spec.kind = WorkloadKind::strided;
    jobs[0].spec.bytes_per_pc = 65536;
    jobs[0].spec.pc_num = 1;
    jobs[1] = jobs[0];
    jobs[1].spec.stride = 3;
    CHECK_THROWS_AS(run_jobs(jobs, 2), ConfigError);
  }

  TEST_CASE("environment overrides") {
    ::setenv("HBMSIM_PARALLELISM", "3", 1);
    CHECK(env_parallelism(1) == 3);
    ::setenv("HBMSIM_PARALLELISM", "zero", 1);
    CHECK_THROWS_AS(env_parallelism(1), ConfigError);
    ::unsetenv("HBMSIM_PARALLELISM");
    CHECK(env_parallelism(5) == 5);

    ::setenv("HBMSIM_OUTPUT_DIR", "/tmp/hbmsim_out", 1);
    CHECK(env_output_dir(".") == fs::path("/tmp/hbmsim_out"));
    ::unsetenv("HBMSIM_OUTPUT_DIR");
    CHECK(env_output_dir("fallback") == fs::path("fallback"));
  }

  TEST_CASE("profile references resolve relative to the config") {
    const fs::path dir = fs::temp_directory_path() / "hbmsim_cfgdir";
    fs::create_directories(dir);
    std::ofstream(dir / "slow.json") << R"({"base": "u280", "name": "slow", "kernel_clock_max_mhz": 150})";
    std::ofstream(dir / "cfg.json") << R"({"profile": "slow.json", "workloads": []})";
    CHECK(load_experiment(dir / "cfg.json").profile.name == "slow");
    const auto inline_cfg = parse_experiment(json::parse(R"({"profile": {"base": "u50"}, "workloads": []})"));
    CHECK(inline_cfg.profile.usable_pcs().size() == 24);
    fs::remove_all(dir);
  }
}
