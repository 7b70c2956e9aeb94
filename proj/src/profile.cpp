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

#include "hbmsim/profile.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace hbmsim {

namespace {

using nlohmann::json;

std::bitset<kMaxPcs> first_n(unsigned n) {
  std::bitset<kMaxPcs> mask;
  for (unsigned i = 0; i < n; ++i) mask.set(i);
  return mask;
}

// Alveo U280/U50 share the HBM subsystem; they differ in the PCs that can be
// routed. lat_hbm + t_page_miss + one 512b transfer reproduces the 182 ns
// memory-side share of the pointer-chase latency.
PlatformProfile alveo_base() {
  PlatformProfile p;
  p.pc_count = 32;
  p.pc_capacity = 256ULL << 20;
  p.slave_data_width = 256;
  p.slave_clock = 450e6;
  p.master_data_width = 512;
  p.kernel_clock_max = 300e6;
  p.ideal_total_bw = 460.8e9;
  p.per_pc_efficiency = 0.90;
  p.page_size = 4096;
  p.banks_per_pc = 16;
  p.t_rc = SimTime::from_ns(29.0);
  p.t_page_miss = SimTime::from_ns(117.0);
  p.lat_hbm = SimTime::from_ns(60.0);
  p.lat_pe_default = SimTime::from_ns(47.0);
  p.crossbar = CrossbarTopology{8, 4, 12.5e9, SimTime::from_ns(4.444)};
  p.hls_master = AxiMasterProfile{4, 8, 64, BurstInference::automatic};
  p.rtl_master = AxiMasterProfile{64, 64, 64, BurstInference::automatic};
  p.burst_len_fixed_to_one = false;
  p.enforce_bundle_rules = true;
  return p;
}

PlatformProfile make_u280() {
  PlatformProfile p = alveo_base();
  p.name = "u280";
  p.usable_pc_mask = first_n(30);  // PC 30/31 overlap the PCIe static region
  return p;
}

PlatformProfile make_u50() {
  PlatformProfile p = alveo_base();
  p.name = "u50";
  p.usable_pc_mask = first_n(24);  // PC 24-29 fail routing
  return p;
}

// Per-PE connections are synthesized as custom logic, so every PE reaches
// every PC without sharing a lateral link: one switch spanning all ports.
PlatformProfile make_s10mx() {
  PlatformProfile p;
  p.name = "s10mx";
  p.pc_count = 32;
  p.usable_pc_mask = first_n(32);
  p.pc_capacity = 256ULL << 20;
  p.slave_data_width = 256;
  p.slave_clock = 400e6;
  p.master_data_width = 256;
  p.kernel_clock_max = 450e6;
  p.ideal_total_bw = 409.6e9;
  p.per_pc_efficiency = 0.87;
  p.page_size = 4096;
  p.banks_per_pc = 16;
  p.t_rc = SimTime::from_ns(29.0);
  p.t_page_miss = SimTime::from_ns(75.0);
  p.lat_hbm = SimTime::from_ns(63.0);
  p.lat_pe_default = SimTime::from_ns(492.0);
  p.crossbar = CrossbarTopology{1, 32, 0.0, SimTime{}};
  p.hls_master = AxiMasterProfile{64, 64, 1, BurstInference::always_one};
  p.rtl_master = AxiMasterProfile{64, 64, 1, BurstInference::always_one};
  p.burst_len_fixed_to_one = true;
  p.enforce_bundle_rules = false;
  return p;
}

std::string to_string(BurstInference b) { return b == BurstInference::automatic ? "automatic" : "always_one"; }

BurstInference burst_inference_from(const std::string& s) {
  if (s == "automatic") return BurstInference::automatic;
  if (s == "always_one") return BurstInference::always_one;
  throw ConfigError("burst_inference must be 'automatic' or 'always_one', got '" + s + "'");
}

json master_to_json(const AxiMasterProfile& m) {
  return json{{"max_outstanding_reads", m.max_outstanding_reads},
              {"max_outstanding_writes", m.max_outstanding_writes},
              {"max_burst_len", m.max_burst_len},
              {"burst_inference", to_string(m.burst_inference)}};
}

template <typename T>
T field(const json& j, const char* key, const T& fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

SimTime ns_field(const json& j, const char* key, SimTime fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) throw ConfigError(std::string("field '") + key + "' must be a number (ns)");
  double v = it->get<double>();
  if (v < 0) throw ConfigError(std::string("field '") + key + "' must be non-negative");
  return SimTime::from_ns(v);
}

AxiMasterProfile master_from_json(const json& j, const AxiMasterProfile& base) {
  AxiMasterProfile m = base;
  m.max_outstanding_reads = field(j, "max_outstanding_reads", m.max_outstanding_reads);
  m.max_outstanding_writes = field(j, "max_outstanding_writes", m.max_outstanding_writes);
  m.max_burst_len = field(j, "max_burst_len", m.max_burst_len);
  if (j.contains("burst_inference")) m.burst_inference = burst_inference_from(j.at("burst_inference").get<std::string>());
  return m;
}

}  // namespace

void AxiMasterProfile::validate() const {
  if (max_outstanding_reads < 1 || max_outstanding_writes < 1)
    throw ConfigError("AXI master needs at least one outstanding read and write");
  if (max_burst_len < 1 || max_burst_len > kMaxBurstLen)
    throw ConfigError("max_burst_len must be in [1, 256]");
}

void CrossbarTopology::validate() const {
  if (unit_switches < 1 || ports_per_switch < 1) throw ConfigError("crossbar needs at least one switch and port");
  if (lateral_bw < 0) throw ConfigError("lateral_bw must be non-negative");
}

std::vector<unsigned> PlatformProfile::usable_pcs() const {
  std::vector<unsigned> out;
  for (unsigned i = 0; i < pc_count; ++i)
    if (usable_pc_mask.test(i)) out.push_back(i);
  return out;
}

void PlatformProfile::validate() const {
  auto fail = [this](const std::string& what) { throw ConfigError("profile '" + name + "': " + what); };
  if (pc_count < 1 || pc_count > kMaxPcs) fail("pc_count must be in [1, 64]");
  if (usable_pc_mask.none()) fail("no usable PCs");
  for (std::size_t i = pc_count; i < kMaxPcs; ++i)
    if (usable_pc_mask.test(i)) fail("usable_pcs lists a PC beyond pc_count");
  if (pc_capacity == 0) fail("pc_capacity must be positive");
  if (slave_data_width == 0 || slave_data_width % 8) fail("slave_data_width must be a positive multiple of 8");
  if (master_data_width == 0 || master_data_width % 8) fail("master_data_width must be a positive multiple of 8");
  if (!(slave_clock > 0) || !(kernel_clock_max > 0)) fail("clocks must be positive");
  if (!(ideal_total_bw > 0)) fail("ideal_total_bw must be positive");
  if (!(per_pc_efficiency > 0.0 && per_pc_efficiency <= 1.0)) fail("per_pc_efficiency must be in (0, 1]");
  if (page_size == 0 || banks_per_pc == 0) fail("page_size and banks_per_pc must be positive");
  if (crossbar.unit_switches * crossbar.ports_per_switch < pc_count)
    fail("crossbar has fewer ports than PCs");
  crossbar.validate();
  hls_master.validate();
  rtl_master.validate();
  if (burst_len_fixed_to_one &&
      (hls_master.burst_inference != BurstInference::always_one || rtl_master.burst_inference != BurstInference::always_one))
    fail("burst_len_fixed_to_one requires always_one burst inference on every master");
}

std::vector<std::string> builtin_profile_names() { return {"u280", "u50", "s10mx"}; }

PlatformProfile builtin_profile(const std::string& name) {
  if (name == "u280") return make_u280();
  if (name == "u50") return make_u50();
  if (name == "s10mx") return make_s10mx();
  throw ConfigError("unknown profile '" + name + "' (known: u280, u50, s10mx)");
}

json profile_to_json(const PlatformProfile& p) {
  json usable = json::array();
  for (unsigned pc : p.usable_pcs()) usable.push_back(pc);
  return json{
      {"name", p.name},
      {"pc_count", p.pc_count},
      {"usable_pcs", usable},
      {"pc_capacity_bytes", p.pc_capacity},
      {"slave_data_width_bits", p.slave_data_width},
      {"slave_clock_mhz", p.slave_clock / 1e6},
      {"master_data_width_bits", p.master_data_width},
      {"kernel_clock_max_mhz", p.kernel_clock_max / 1e6},
      {"ideal_total_bw_gbs", p.ideal_total_bw / 1e9},
      {"per_pc_efficiency", p.per_pc_efficiency},
      {"page_size_bytes", p.page_size},
      {"banks_per_pc", p.banks_per_pc},
      {"t_rc_ns", p.t_rc.ns()},
      {"t_page_miss_ns", p.t_page_miss.ns()},
      {"lat_hbm_ns", p.lat_hbm.ns()},
      {"lat_pe_default_ns", p.lat_pe_default.ns()},
      {"crossbar",
       {{"unit_switches", p.crossbar.unit_switches},
        {"ports_per_switch", p.crossbar.ports_per_switch},
        {"lateral_bw_gbs", p.crossbar.lateral_bw / 1e9},
        {"hop_latency_ns", p.crossbar.hop_latency.ns()}}},
      {"hls_master", master_to_json(p.hls_master)},
      {"rtl_master", master_to_json(p.rtl_master)},
      {"burst_len_fixed_to_one", p.burst_len_fixed_to_one},
      {"enforce_bundle_rules", p.enforce_bundle_rules},
  };
}

PlatformProfile profile_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("profile must be a JSON object");
  // An optional "base" names a builtin whose values fill unspecified fields.
  PlatformProfile p = j.contains("base") ? builtin_profile(j.at("base").get<std::string>()) : PlatformProfile{};
  p.name = field(j, "name", p.name);
  p.pc_count = field(j, "pc_count", p.pc_count);
  if (auto it = j.find("usable_pcs"); it != j.end()) {
    p.usable_pc_mask.reset();
    for (const auto& v : *it) {
      auto pc = v.get<unsigned>();
      if (pc >= kMaxPcs) throw ConfigError("usable_pcs entry out of range");
      p.usable_pc_mask.set(pc);
    }
  } else if (!j.contains("base")) {
    p.usable_pc_mask = first_n(p.pc_count);
  }
  p.pc_capacity = field(j, "pc_capacity_bytes", p.pc_capacity);
  p.slave_data_width = field(j, "slave_data_width_bits", p.slave_data_width);
  p.slave_clock = field(j, "slave_clock_mhz", p.slave_clock / 1e6) * 1e6;
  p.master_data_width = field(j, "master_data_width_bits", p.master_data_width);
  p.kernel_clock_max = field(j, "kernel_clock_max_mhz", p.kernel_clock_max / 1e6) * 1e6;
  p.ideal_total_bw = field(j, "ideal_total_bw_gbs", p.ideal_total_bw / 1e9) * 1e9;
  p.per_pc_efficiency = field(j, "per_pc_efficiency", p.per_pc_efficiency);
  p.page_size = field(j, "page_size_bytes", p.page_size);
  p.banks_per_pc = field(j, "banks_per_pc", p.banks_per_pc);
  p.t_rc = ns_field(j, "t_rc_ns", p.t_rc);
  p.t_page_miss = ns_field(j, "t_page_miss_ns", p.t_page_miss);
  p.lat_hbm = ns_field(j, "lat_hbm_ns", p.lat_hbm);
  p.lat_pe_default = ns_field(j, "lat_pe_default_ns", p.lat_pe_default);
  if (auto it = j.find("crossbar"); it != j.end()) {
    const json& c = *it;
    p.crossbar.unit_switches = field(c, "unit_switches", p.crossbar.unit_switches);
    p.crossbar.ports_per_switch = field(c, "ports_per_switch", p.crossbar.ports_per_switch);
    p.crossbar.lateral_bw = field(c, "lateral_bw_gbs", p.crossbar.lateral_bw / 1e9) * 1e9;
    p.crossbar.hop_latency = ns_field(c, "hop_latency_ns", p.crossbar.hop_latency);
  }
  if (auto it = j.find("hls_master"); it != j.end()) p.hls_master = master_from_json(*it, p.hls_master);
  if (auto it = j.find("rtl_master"); it != j.end()) p.rtl_master = master_from_json(*it, p.rtl_master);
  p.burst_len_fixed_to_one = field(j, "burst_len_fixed_to_one", p.burst_len_fixed_to_one);
  p.enforce_bundle_rules = field(j, "enforce_bundle_rules", p.enforce_bundle_rules);
  p.validate();
  return p;
}

PlatformProfile load_profile(const std::string& ref) {
  namespace fs = std::filesystem;
  if (!fs::exists(ref)) return builtin_profile(ref);
  std::ifstream in(ref);
  if (!in) throw ConfigError("cannot open profile file '" + ref + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("profile '" + ref + "': " + e.what());
  }
  return profile_from_json(j);
}

double sequential_bandwidth_bound(const PlatformProfile& p) { return p.effective_pc_bw(); }

}  // namespace hbmsim
