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

#include "hbmsim/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hbmsim {

void AnalyticParams::validate() const {
  if (!(bw_max > 0) || !(bw_str > 0) || !(bw_mc > 0)) throw ConfigError("analytic params: bandwidths must be positive");
  if (dw == 0) throw ConfigError("analytic params: dw must be positive");
  if (!(kernel_clock > 0)) throw ConfigError("analytic params: kernel_clock must be positive");
}

AnalyticParams AnalyticParams::at_clock(double hz) const {
  if (!(hz > 0)) throw ConfigError("analytic params: clock must be positive");
  AnalyticParams q = *this;
  q.lat_pe = SimTime::from_ps(static_cast<std::uint64_t>(std::llround(static_cast<double>(lat_pe.ps()) * kernel_clock / hz)));
  q.kernel_clock = hz;
  return q;
}

SimTime t_bur(unsigned blen, unsigned dw, double bw_max, SimTime lat) {
  if (blen == 0 || dw == 0 || !(bw_max > 0)) throw ConfigError("t_bur: blen, dw and bw_max must be positive");
  return SimTime::transfer(static_cast<double>(blen) * dw / 8.0, bw_max) + lat;
}

double bica_bw(unsigned pc_num, unsigned blen, const AnalyticParams& p, SimTime lat) {
  if (pc_num == 0) throw ConfigError("bica_bw: pc_num must be >= 1");
  p.validate();
  const double t = t_bur(blen, p.dw, p.bw_max, lat).seconds();
  const double bytes = static_cast<double>(pc_num) * blen * p.dw / 8.0;
  return std::min(bytes / t, p.bw_mc);
}

double bipa_bw(unsigned pc_num, unsigned pe_num, const AnalyticParams& p, BipaForm form) {
  p.validate();
  const double line = p.dw / 8.0;
  const double arb_s = 2.0 * pe_num / p.kernel_clock;
  const double lat_s = p.lat_hbm.seconds() + p.lat_pe.seconds() + arb_s;
  switch (form) {
    case BipaForm::consistent:
      return pc_num * line / (line / p.bw_str + lat_s);
    case BipaForm::as_printed: {
      // GB/s, ns and bits exactly as the symbols read
      const double gbs = pc_num / (1.0 / (p.bw_str / 1e9) + (p.lat_hbm.ns() + p.lat_pe.ns() + 2.0 * pe_num) / p.dw);
      return gbs * 1e9;
    }
    case BipaForm::time_shared:
      if (pe_num == 0) throw ConfigError("bipa_bw: time-shared form needs pe_num >= 1");
      return pc_num / (1.0 / p.bw_str + lat_s / (pe_num * line));
  }
  throw ConfigError("bipa_bw: unknown form");
}

AnalyticParams calibrate(const std::vector<BandwidthReport>& reports) {
  const BandwidthReport* seq = nullptr;
  const BandwidthReport* str = nullptr;
  const BandwidthReport* mc = nullptr;
  const BandwidthReport* chase = nullptr;
  std::uint64_t best_stride = 0;
  for (const auto& r : reports) {
    if (r.workload == "seq_copy" && r.pc_num == 1 && !seq) seq = &r;
    if (r.workload == "strided" && r.pattern.rfind("stride_", 0) == 0) {
      const std::uint64_t s = std::stoull(r.pattern.substr(7));
      if (!str || s > best_stride) {
        str = &r;
        best_stride = s;
      }
    }
    if (r.workload == "unicast" && r.pattern == "8x8" && !mc) mc = &r;
    if (r.workload == "pointer_chase" && r.lat_mem_ns && r.lat_pe_ns && !chase) chase = &r;
  }
  std::string missing;
  auto need = [&missing](const void* p, const char* what) {
    if (p) return;
    if (!missing.empty()) missing += ", ";
    missing += what;
  };
  need(seq, "seq_copy (1 PC)");
  need(str, "strided");
  need(mc, "unicast 8x8");
  need(chase, "pointer_chase");
  if (!missing.empty()) throw ConfigError("calibrate: missing microbenchmark(s): " + missing);

  AnalyticParams p;
  p.bw_max = seq->eff_bw();
  p.bw_str = str->eff_bw() / std::max(1U, str->pc_num);
  p.bw_mc = mc->eff_bw();
  p.dw = seq->data_width;
  // the chase latency already contains one line transfer, which t_bur adds back
  const double line_ns = p.dw / 8.0 / p.bw_max * 1e9;
  p.lat_hbm = SimTime::from_ns(std::max(0.0, *chase->lat_mem_ns - line_ns));
  p.lat_pe = SimTime::from_ns(*chase->lat_pe_ns);
  p.kernel_clock = chase->kernel_clock;
  return p;
}

std::vector<WorkloadSpec> calibration_specs(const PlatformProfile& profile, std::uint64_t bytes_per_pc) {
  std::vector<WorkloadSpec> v(4);
  for (auto& s : v) s.bytes_per_pc = bytes_per_pc;
  v[0].kind = WorkloadKind::seq_copy;
  v[0].mode = CopyMode::read_only;
  v[0].pc_num = 1;
  v[1].kind = WorkloadKind::strided;
  v[1].stride = std::min<std::uint64_t>(4096, profile.pc_capacity);
  v[2].kind = WorkloadKind::unicast;
  v[2].pattern = 8;
  v[3].kind = WorkloadKind::pointer_chase;
  return v;
}

nlohmann::json analytic_to_json(const AnalyticParams& p) {
  return nlohmann::json{{"bw_max", p.bw_max},           {"bw_str", p.bw_str},
                        {"bw_mc", p.bw_mc},             {"lat_hbm_ps", p.lat_hbm.ps()},
                        {"lat_pe_ps", p.lat_pe.ps()},   {"dw", p.dw},
                        {"kernel_clock", p.kernel_clock}};
}

AnalyticParams analytic_from_json(const nlohmann::json& j) {
  AnalyticParams p;
  try {
    p.bw_max = j.at("bw_max").get<double>();
    p.bw_str = j.at("bw_str").get<double>();
    p.bw_mc = j.at("bw_mc").get<double>();
    p.lat_hbm = SimTime::from_ps(j.at("lat_hbm_ps").get<std::uint64_t>());
    p.lat_pe = SimTime::from_ps(j.at("lat_pe_ps").get<std::uint64_t>());
    p.dw = j.at("dw").get<unsigned>();
    p.kernel_clock = j.at("kernel_clock").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("analytic params: ") + e.what());
  }
  p.validate();
  return p;
}

}  // namespace hbmsim
