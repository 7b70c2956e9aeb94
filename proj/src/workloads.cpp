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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "workload_common.hpp"

namespace hbmsim {

namespace {

struct KindName {
  WorkloadKind kind;
  const char* name;
};

constexpr KindName kKinds[] = {
    {WorkloadKind::seq_copy, "seq_copy"},           {WorkloadKind::strided, "strided"},
    {WorkloadKind::bitwidth_sweep, "bitwidth_sweep"}, {WorkloadKind::freq_sweep, "freq_sweep"},
    {WorkloadKind::unicast, "unicast"},             {WorkloadKind::pointer_chase, "pointer_chase"},
    {WorkloadKind::bucket_sort, "bucket_sort"},     {WorkloadKind::radix_sort, "radix_sort"},
    {WorkloadKind::binary_search, "binary_search"}, {WorkloadKind::dfs, "dfs"},
};

bool is_pow2(std::uint64_t x) { return x && !(x & (x - 1)); }

}  // namespace

const char* to_string(WorkloadKind k) {
  for (const auto& e : kKinds)
    if (e.kind == k) return e.name;
  return "?";
}

const char* to_string(Arch a) {
  switch (a) {
    case Arch::baseline: return "baseline";
    case Arch::bica: return "bica";
    case Arch::bipa: return "bipa";
  }
  return "?";
}

const char* to_string(CopyMode m) {
  switch (m) {
    case CopyMode::read_write: return "read_write";
    case CopyMode::read_only: return "read_only";
    case CopyMode::write_only: return "write_only";
  }
  return "?";
}

WorkloadKind parse_workload_kind(const std::string& s) {
  for (const auto& e : kKinds)
    if (s == e.name) return e.kind;
  throw ConfigError("unknown workload kind '" + s + "'");
}

Arch parse_arch(const std::string& s) {
  if (s == "baseline") return Arch::baseline;
  if (s == "bica") return Arch::bica;
  if (s == "bipa") return Arch::bipa;
  throw ConfigError("unknown arch '" + s + "' (expected baseline, bica or bipa)");
}

CopyMode parse_copy_mode(const std::string& s) {
  if (s == "read_write" || s == "rw") return CopyMode::read_write;
  if (s == "read_only" || s == "read") return CopyMode::read_only;
  if (s == "write_only" || s == "write") return CopyMode::write_only;
  throw ConfigError("unknown copy mode '" + s + "'");
}

void WorkloadSpec::validate(const PlatformProfile& p) const {
  auto fail = [&](const std::string& what) { throw ConfigError(std::string(to_string(kind)) + ": " + what); };
  if (bytes_per_pc == 0) fail("bytes_per_pc must be positive");
  if (bytes_per_pc > p.pc_capacity) fail("bytes_per_pc exceeds the PC capacity");
  if (kernel_clock < 0 || kernel_clock > p.kernel_clock_max * (1 + 1e-9))
    fail("kernel_clock must be in (0, kernel_clock_max]");
  if (data_width != 0 && (data_width % 8 || data_width > p.master_data_width))
    fail("data_width must be a multiple of 8 and at most the master width");
  if (pc_num > p.usable_pcs().size()) fail("pc_num exceeds the usable PCs of the profile");
  for (unsigned pc : read_pcs)
    if (!p.usable(pc)) fail("read PC " + std::to_string(pc) + " is not usable");
  for (unsigned pc : write_pcs)
    if (!p.usable(pc)) fail("write PC " + std::to_string(pc) + " is not usable");
  if (kind == WorkloadKind::strided && (stride < 64 || !is_pow2(stride))) fail("stride must be a power of two >= 64");
  if (kind == WorkloadKind::unicast && !(pattern == 1 || pattern == 2 || pattern == 4 || pattern == 8))
    fail("pattern must be 1, 2, 4 or 8");
  if (blen < 1 || blen > kMaxBurstLen) fail("blen must be in [1, 256]");
  if (fifo_depth < blen) fail("fifo_depth must be >= blen");
  if (pes_per_pc < 1) fail("pes_per_pc must be >= 1");
  if (key_bits < 3 || key_bits > 63 || key_bits % 3) fail("key_bits must be a multiple of 3 in [3, 63]");
  if (kind == WorkloadKind::pointer_chase && chain_length < 2) fail("chain_length must be >= 2");
  if (single_bucket && *single_bucket >= 8) fail("single_bucket must be < 8");
}

double BandwidthReport::eff_bw() const {
  const double s = elapsed.seconds();
  return s > 0 ? static_cast<double>(bytes()) / s : 0.0;
}

namespace detail {

RunContext::RunContext(const PlatformProfile& profile, const WorkloadSpec& spec)
    : sys(std::make_unique<HbmSystem>(profile)),
      kernel("kernel", spec.kernel_clock > 0 ? spec.kernel_clock : profile.kernel_clock_max),
      data_width(spec.data_width ? spec.data_width : profile.master_data_width) {
  // The PE pipeline has a fixed depth in cycles; its latency is quoted at the
  // maximum kernel clock and stretches at lower clocks.
  const SimTime lat = spec.lat_pe.value_or(profile.lat_pe_default);
  const double max_period_ps = 1e12 / profile.kernel_clock_max;
  lat_pe_cycles = static_cast<std::uint64_t>(std::llround(static_cast<double>(lat.ps()) / max_period_ps));
}

MemRequest RunContext::request(AccessKind kind, unsigned pc, std::uint64_t address, unsigned blen, unsigned pe) {
  MemRequest r;
  r.id = sys->next_request_id();
  r.kind = kind;
  r.pc = pc;
  r.address = address;
  r.burst_len = blen;
  r.beat_width = data_width;
  r.pe = pe;
  return r;
}

void RunContext::run() { sys->engine().run(); }

void RunContext::finish(BandwidthReport& r, SimTime end) const {
  const std::uint64_t submitted = sys->bytes_submitted(AccessKind::read) + sys->bytes_submitted(AccessKind::write);
  const std::uint64_t served = sys->bytes_served_total();
  if (submitted != served || r.bytes() != served) {
    std::ostringstream msg;
    msg << r.workload << ": byte conservation violated (submitted " << submitted << ", served " << served
        << ", reported " << r.bytes() << ")";
    throw SimulationError(msg.str());
  }
  r.elapsed = end;
  r.per_pc = sys->per_pc_bytes();
  r.events = sys->engine().events_fired();
  r.trace_hash = sys->engine().trace_hash();
}

BandwidthReport base_report(const PlatformProfile& profile, const WorkloadSpec& spec, const RunContext& ctx) {
  BandwidthReport r;
  r.workload = to_string(spec.kind);
  r.profile = profile.name;
  r.arch = to_string(spec.arch);
  r.blen = spec.blen;
  r.pe_num = spec.pes_per_pc;
  r.data_width = ctx.data_width;
  r.kernel_clock = ctx.kernel.frequency();
  return r;
}

std::vector<unsigned> default_pcs(const PlatformProfile& profile, unsigned count) {
  std::vector<unsigned> all = profile.usable_pcs();
  if (count == 0 || count >= all.size()) return all;
  all.resize(count);
  return all;
}

}  // namespace detail

BandwidthReport run_workload(const PlatformProfile& profile, const WorkloadSpec& spec) {
  switch (spec.kind) {
    case WorkloadKind::seq_copy: return run_seq_copy(profile, spec);
    case WorkloadKind::strided: return run_strided(profile, spec);
    case WorkloadKind::bitwidth_sweep:
    case WorkloadKind::freq_sweep: {
      // A single point of a sweep is a read-only sequential run.
      WorkloadSpec s = spec;
      s.kind = WorkloadKind::seq_copy;
      BandwidthReport r = run_seq_copy(profile, s);
      r.workload = to_string(spec.kind);
      return r;
    }
    case WorkloadKind::unicast: return run_unicast(profile, spec);
    case WorkloadKind::pointer_chase: return run_pointer_chase(profile, spec);
    case WorkloadKind::bucket_sort: return run_bucket_sort(profile, spec);
    case WorkloadKind::radix_sort: return run_radix_sort(profile, spec);
    case WorkloadKind::binary_search: return run_binary_search(profile, spec);
    case WorkloadKind::dfs: return run_dfs(profile, spec);
  }
  throw ConfigError("unhandled workload kind");
}

std::vector<BandwidthReport> run_bitwidth_sweep(const PlatformProfile& profile, const WorkloadSpec& spec,
                                                const std::vector<unsigned>& widths) {
  std::vector<BandwidthReport> out;
  for (unsigned w : widths) {
    WorkloadSpec s = spec;
    s.kind = WorkloadKind::seq_copy;
    s.data_width = w;
    BandwidthReport r = run_seq_copy(profile, s);
    r.workload = to_string(WorkloadKind::bitwidth_sweep);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<BandwidthReport> run_freq_sweep(const PlatformProfile& profile, const WorkloadSpec& spec,
                                            const std::vector<double>& freqs_hz) {
  std::vector<BandwidthReport> out;
  for (double f : freqs_hz) {
    if (!(f > 0) || f > profile.kernel_clock_max * (1 + 1e-9))
      throw ConfigError("frequency sweep point outside (0, kernel_clock_max]");
    WorkloadSpec s = spec;
    s.kind = WorkloadKind::seq_copy;
    s.kernel_clock = f;
    BandwidthReport r = run_seq_copy(profile, s);
    r.workload = to_string(WorkloadKind::freq_sweep);
    out.push_back(std::move(r));
  }
  return out;
}

double saturation_knee(const std::vector<BandwidthReport>& sweep, double fraction) {
  if (sweep.empty()) throw ConfigError("empty sweep");
  std::vector<const BandwidthReport*> pts;
  for (const auto& r : sweep) pts.push_back(&r);
  std::sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->kernel_clock < b->kernel_clock; });
  double peak = 0.0;
  for (auto* r : pts) peak = std::max(peak, r->eff_bw());
  const double target = fraction * peak;
  // linear interpolation between the bracketing sweep points
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i]->eff_bw() >= target) {
      if (i == 0) return pts[0]->kernel_clock;
      const double f0 = pts[i - 1]->kernel_clock, f1 = pts[i]->kernel_clock;
      const double b0 = pts[i - 1]->eff_bw(), b1 = pts[i]->eff_bw();
      return f0 + (target - b0) * (f1 - f0) / (b1 - b0);
    }
  }
  return pts.back()->kernel_clock;
}

}  // namespace hbmsim
