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

#include <cmath>
#include <random>
#include <sstream>

#include "hbmsim/report.hpp"

using namespace hbmsim;

namespace {

BandwidthReport sample(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BandwidthReport r;
  r.workload = "bucket_sort";
  r.profile = "u280";
  r.pattern = "8x8";
  r.blen = 1 + static_cast<unsigned>(rng() % 64);
  r.pe_num = 1 + static_cast<unsigned>(rng() % 16);
  r.pc_num = 1 + static_cast<unsigned>(rng() % 32);
  r.kernel_clock = 50e6 + u(rng) * 400e6;
  r.bytes_read = rng() % (1ULL << 40);
  r.bytes_written = rng() % (1ULL << 40);
  r.elapsed = SimTime(1 + rng() % (1ULL << 50));
  if (rng() % 2) r.latency_ns = u(rng) * 1000;
  r.correct = rng() % 4 != 0;
  return r;
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("column set is stable") {
    CHECK(csv_columns() == std::vector<std::string>{"workload", "profile", "pattern", "blen", "pe_num", "pc_num",
                                                    "kernel_clock_mhz", "bytes", "elapsed_ns", "eff_bw_gbs",
                                                    "latency_ns", "correctness"});
    std::ostringstream os;
    write_csv(os, {});
    CHECK(os.str() == "workload,profile,pattern,blen,pe_num,pc_num,kernel_clock_mhz,bytes,elapsed_ns,eff_bw_gbs,"
                      "latency_ns,correctness\n");
  }

  TEST_CASE("real cells survive parse and reformat at 6 significant digits") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> mant(1.0, 10.0);
    std::uniform_int_distribution<int> expo(-12, 15);
    for (int i = 0; i < 10000; ++i) {
      const double v = mant(rng) * std::pow(10.0, expo(rng));
      const std::string once = format_real(v);
      CHECK(format_real(std::stod(once)) == once);
      CHECK(std::stod(once) == doctest::Approx(v).epsilon(5e-6));
    }
    CHECK(format_real(388.0) == "388");
    CHECK(format_real(0.0) == "0");
  }

  TEST_CASE("CSV round trip") {
    std::mt19937_64 rng(5);
    std::vector<BandwidthReport> reports;
    for (int i = 0; i < 200; ++i) reports.push_back(sample(rng));
    std::stringstream ss;
    write_csv(ss, reports);
    const auto rows = read_csv(ss);
    REQUIRE(rows.size() == reports.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto cells = csv_cells(reports[i]);
      for (std::size_t c = 0; c < cells.size(); ++c) CHECK(rows[i].at(csv_columns()[c]) == cells[c]);
      CHECK(std::stoull(rows[i].at("bytes")) == reports[i].bytes());
      CHECK(rows[i].at("latency_ns").empty() == !reports[i].latency_ns.has_value());
    }
  }

  TEST_CASE("malformed CSV is rejected") {
    std::istringstream empty("");
    CHECK_THROWS_AS(read_csv(empty), ConfigError);
    std::istringstream header("a,b\n");
    CHECK_THROWS_AS(read_csv(header), ConfigError);
    std::ostringstream os;
    write_csv(os, {});
    std::istringstream ragged(os.str() + "x,y\n");
    CHECK_THROWS_WITH_AS(read_csv(ragged), doctest::Contains("line 2"), ConfigError);
  }

  TEST_CASE("JSON mirrors the CSV and adds detail") {
    std::mt19937_64 rng(9);
    BandwidthReport r = sample(rng);
    r.per_pc = {10, 20};
    const auto j = report_to_json(r);
    CHECK(j["workload"] == "bucket_sort");
    CHECK(j["bytes"].get<std::uint64_t>() == r.bytes());
    CHECK(format_real(j["eff_bw_gbs"].get<double>()) == format_real(r.eff_bw() / 1e9));
    CHECK(j["per_pc_bytes"] == nlohmann::json::array({10, 20}));
    const auto all = reports_to_json({r, r});
    CHECK(all["runs"].size() == 2);
    CHECK(all["columns"].size() == csv_columns().size());
  }
}
