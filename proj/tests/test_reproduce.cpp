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
#include <fstream>
#include <map>
#include <sstream>

#include "hbmsim/reproduce.hpp"

using namespace hbmsim;

TEST_SUITE("reproduce") {
  TEST_CASE("reference file covers every table with provenance") {
    const std::map<std::string, std::size_t> expected{{"t2", 15}, {"t3", 18}, {"t4", 8},
                                                      {"t5", 6},  {"t7", 9},  {"t8", 8}};
    CHECK(table_ids().size() == expected.size());
    for (const auto& t : table_ids()) {
      CAPTURE(t);
      CHECK(is_table_id(t));
      const auto cells = load_reference(default_reference_path(), t);
      CHECK(cells.size() == expected.at(t));
      for (const auto& c : cells) {
        CAPTURE(c.id);
        CHECK_FALSE(c.source.empty());
        CHECK(c.tolerance.has_value() != c.range.has_value());
        CHECK(builtin_profile(c.profile).name == c.profile);
      }
    }
    CHECK_FALSE(is_table_id("t6"));
    CHECK_THROWS_AS(load_reference(default_reference_path(), "t6"), ConfigError);
    CHECK_THROWS_AS(reproduce("t9"), ConfigError);
  }

  TEST_CASE("tolerance and range acceptance") {
    ReferenceCell c;
    c.measured = 100;
    c.tolerance = 0.1;
    CHECK(c.accepts(90));
    CHECK(c.accepts(110));
    CHECK_FALSE(c.accepts(110.5));
    c.tolerance.reset();
    c.range = std::make_pair(2.0, 2.9);
    CHECK(c.accepts(2.9));
    CHECK_FALSE(c.accepts(3.0));
  }

  TEST_CASE("latency table scores every cell") {
    ReproduceOptions opt;
    opt.bytes_per_pc = kMiB;
    const Reproduction r = reproduce("t5", opt);
    REQUIRE(r.cells.size() == 6);
    for (const auto& c : r.cells) {
      CAPTURE(c.ref.id);
      CHECK(c.rel_error == doctest::Approx((c.simulated - c.ref.measured) / c.ref.measured));
      CHECK(c.pass == c.ref.accepts(c.simulated));
    }
    std::ostringstream csv;
    write_comparison_csv(csv, r);
    const std::string text = csv.str();
    CHECK(text.rfind("table,id,profile,unit,simulated,measured,rel_error,tolerance,pass,source\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 7);
    const auto j = comparison_to_json(r);
    CHECK(j["cells"].size() == 6);
  }

  TEST_CASE("malformed reference files are rejected") {
    const auto p = std::filesystem::temp_directory_path() / "hbmsim_ref.json";
    std::ofstream(p) << R"({"tables": {"t5": [{"id": "x", "profile": "u280", "unit": "ns", "measured": 1}]}})";
    CHECK_THROWS_AS(load_reference(p, "t5"), ConfigError);
    std::filesystem::remove(p);
  }
}
