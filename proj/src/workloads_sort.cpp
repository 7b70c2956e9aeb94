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

// Bucket sort and radix sort: 8 PEs scatter records from 8 source PCs to 8
// bucket PCs, either one record per write (baseline) or batched per PC
// through BICA.

#include <algorithm>
#include <deque>
#include <functional>

#include "hbmsim/arbitrators.hpp"
#include "workload_common.hpp"

namespace hbmsim {

using detail::RunContext;

namespace {

constexpr unsigned kWays = 8;
// Lines a reader keeps buffered or in flight ahead of its splitter.
constexpr std::uint64_t kInputCap = 512;

struct Segment {
  std::uint64_t address = 0;
  std::uint64_t lines = 0;
  /// PE whose bucket region holds the segment; `address` is then an offset
  /// inside that region. Negative for an absolute address.
  int owner = -1;
};

/// One scatter pass over all PEs. Reusable across radix passes.
class Scatter {
 public:
  struct Config {
    Arch arch = Arch::baseline;
    unsigned blen = 64;
    unsigned fifo_depth = 64;
    std::vector<unsigned> src;  // source PC per PE
    std::vector<unsigned> dst;  // bucket PC per bucket id
    std::vector<AxiMaster*> rd;
    std::vector<AxiMaster*> wr;
    std::vector<std::vector<Segment>> input;  // per PE
    std::uint64_t page_size = 4096;
    std::vector<std::uint64_t> region_base;   // per-PE region inside a bucket PC
    std::function<unsigned(const Line&)> bucket_of;
  };

  Scatter(RunContext& ctx, Config cfg) : ctx_(ctx), cfg_(std::move(cfg)) {
    for (unsigned i = 0; i < cfg_.src.size(); ++i) {
      auto pe = std::make_unique<Pe>();
      pe->id = i;
      for (const Segment& s : cfg_.input[i]) {
        std::uint64_t left = s.lines, addr = s.address;
        const unsigned max_b = cfg_.rd[i]->profile().max_burst_len;
        while (left > 0) {
          // bursts stop at page ends, which AXI's 4 KiB rule requires anyway
          const std::uint64_t to_page_end = (cfg_.page_size - addr % cfg_.page_size) / line_bytes();
          const auto b = static_cast<unsigned>(std::min<std::uint64_t>({left, max_b, to_page_end}));
          pe->reads.push_back({s.owner < 0 ? addr : place(static_cast<unsigned>(s.owner), addr), b});
          addr += std::uint64_t{b} * line_bytes();
          left -= b;
        }
      }
      pe->cursor.assign(kWays, 0);
      if (cfg_.arch == Arch::bica) {
        BicaConfig bc;
        bc.pc_targets = cfg_.dst;
        bc.burst_len = cfg_.blen;
        bc.fifo_depth = cfg_.fifo_depth;
        bc.data_width = ctx_.data_width;
        if (cfg_.page_size % (std::uint64_t{cfg_.blen} * line_bytes()))
          throw ConfigError("sort: blen beats must divide the page so bursts stay inside one page");
        pe->bica = std::make_unique<Bica>(bc, std::vector<std::uint64_t>(kWays, 0));
      }
      pes_.push_back(std::move(pe));
    }
    counts_.assign(kWays, std::vector<std::uint64_t>(cfg_.src.size(), 0));
  }

  void start(SimTime at) {
    for (auto& pe : pes_) {
      Pe* p = pe.get();
      ctx_.sys->engine().schedule(at, [this, p] { refill(*p); });
    }
  }

  std::uint64_t place(unsigned pe, std::uint64_t offset) const { return cfg_.region_base.at(pe) + offset; }
  unsigned line_bytes() const { return ctx_.data_width / 8; }

  /// Lines PE `pe` wrote into bucket `b`.
  std::uint64_t count(unsigned b, unsigned pe) const { return counts_[b][pe]; }
  bool drained() const {
    for (const auto& pe : pes_)
      if (!pe->finished()) return false;
    return true;
  }

  std::uint64_t bytes_read = 0;
  std::uint64_t bytes_written = 0;
  SimTime end{};

 private:
  struct ReadBurst {
    std::uint64_t address;
    unsigned lines;
  };
  struct Pe {
    unsigned id = 0;
    std::vector<ReadBurst> reads;
    std::size_t next_read = 0;
    std::uint64_t inflight_lines = 0;
    std::deque<Line> input;
    std::vector<std::uint64_t> cursor;
    std::unique_ptr<Bica> bica;
    unsigned drains_inflight = 0;
    unsigned writes_inflight = 0;
    bool tick_pending = false;
    SimTime next_tick{};

    bool input_done() const { return next_read == reads.size() && inflight_lines == 0 && input.empty(); }
    bool finished() const {
      return input_done() && drains_inflight == 0 && writes_inflight == 0 && (!bica || bica->empty());
    }
  };

  void refill(Pe& pe) {
    AxiMaster& m = *cfg_.rd[pe.id];
    while (pe.next_read < pe.reads.size() &&
           pe.input.size() + pe.inflight_lines + pe.reads[pe.next_read].lines <= kInputCap) {
      const ReadBurst rb = pe.reads[pe.next_read++];
      pe.inflight_lines += rb.lines;
      MemRequest req = ctx_.request(AccessKind::read, cfg_.src[pe.id], rb.address, rb.lines, pe.id);
      Pe* p = &pe;
      m.submit(std::move(req), {}, [this, p](const MemRequest& r, std::vector<Line>&& data, SimTime done) {
        p->inflight_lines -= r.burst_len;
        bytes_read += r.bytes();
        end = max(end, done);
        for (Line& l : data) p->input.push_back(l);
        wake(*p);
      });
    }
    if (pe.input_done()) try_drain(pe);
  }

  void wake(Pe& pe) {
    if (pe.tick_pending) return;
    pe.tick_pending = true;
    schedule_tick(pe, max(ctx_.edge(ctx_.sys->engine().now()), pe.next_tick));
  }

  void schedule_tick(Pe& pe, SimTime at) {
    Pe* p = &pe;
    ctx_.sys->engine().schedule(at, [this, p] {
      // a key may have been accepted after this tick was scheduled
      if (ctx_.sys->engine().now() < p->next_tick) {
        schedule_tick(*p, p->next_tick);
        return;
      }
      p->tick_pending = false;
      tick(*p);
    });
  }

  // One splitter iteration (II = 1).
  void tick(Pe& pe) {
    const SimTime now = ctx_.sys->engine().now();
    if (pe.input.empty()) {
      refill(pe);
      return;
    }
    const Line key = pe.input.front();
    const unsigned b = cfg_.bucket_of(key);
    if (cfg_.arch == Arch::bica) {
      if (!pe.bica->split(BicaRecord{key, cfg_.dst.at(b)})) {
        try_drain(pe);  // batch full; the drain completion wakes us
        return;
      }
      ++counts_[b][pe.id];
      try_drain(pe);
    } else {
      AxiMaster& w = *cfg_.wr[pe.id];
      if (w.in_flight(AccessKind::write) + w.queued(AccessKind::write) >= w.profile().max_outstanding_writes)
        return;  // write window full; a retiring write wakes us
      MemRequest req = ctx_.request(AccessKind::write, cfg_.dst[b], place(pe.id, pe.cursor[b]), 1, pe.id);
      pe.cursor[b] += line_bytes();
      ++counts_[b][pe.id];
      ++pe.writes_inflight;
      Pe* p = &pe;
      w.submit(std::move(req), {key}, [this, p](const MemRequest& r, std::vector<Line>&&, SimTime done) {
        --p->writes_inflight;
        bytes_written += r.bytes();
        end = max(end, done);
        wake(*p);
      });
    }
    pe.input.pop_front();
    pe.next_tick = now + ctx_.kernel.period();
    refill(pe);
    if (!pe.input.empty()) wake(pe);
  }

  void try_drain(Pe& pe) {
    if (!pe.bica || pe.drains_inflight >= pe.bica->config().max_inflight_bursts) return;
    std::optional<unsigned> f = pe.bica->next_ready();
    bool flush = false;
    if (!f && pe.input_done()) {
      f = pe.bica->next_nonempty();
      flush = true;
    }
    if (!f) return;
    BicaBurst burst = pe.bica->drain(*f, flush);
    ++pe.drains_inflight;
    MemRequest req = ctx_.request(AccessKind::write, burst.pc, place(pe.id, burst.address), burst.burst_len, pe.id);
    Pe* p = &pe;
    cfg_.wr[pe.id]->submit(std::move(req), std::move(burst.payload),
                           [this, p](const MemRequest& r, std::vector<Line>&&, SimTime done) {
                             bytes_written += r.bytes();
                             end = max(end, done);
                             // The drain loop waits for the response, so its
                             // pipeline depth sits on the turnaround.
                             const SimTime resume = ctx_.edge(done) + ctx_.cycles(ctx_.lat_pe_cycles);
                             ctx_.sys->engine().schedule(resume, [this, p] {
                               --p->drains_inflight;
                               try_drain(*p);
                               wake(*p);
                             });
                           });
    wake(pe);
  }

  RunContext& ctx_;
  Config cfg_;
  std::vector<std::unique_ptr<Pe>> pes_;
  std::vector<std::vector<std::uint64_t>> counts_;
};

/// Two groups of 8 PCs; every master j is bound to the group it sits in so
/// a radix pass can read from one group and write the other.
struct SortRig {
  std::vector<unsigned> a, b;
  std::vector<AxiMaster*> ma, mb;
};

SortRig make_rig(RunContext& ctx, const PlatformProfile& profile, const WorkloadSpec& spec) {
  SortRig rig;
  rig.a = spec.read_pcs;
  rig.b = spec.write_pcs;
  if (rig.a.empty())
    for (unsigned i = 0; i < kWays; ++i) rig.a.push_back(i);
  if (rig.b.empty())
    for (unsigned i = kWays; i < 2 * kWays; ++i) rig.b.push_back(i);
  if (rig.a.size() != kWays || rig.b.size() != kWays)
    throw ConfigError(std::string(to_string(spec.kind)) + ": needs 8 read PCs and 8 write PCs");
  (void)profile;
  for (unsigned i = 0; i < kWays; ++i) {
    BundleBinding ba;
    ba.master = rig.a[i];
    ba.target_pcs = rig.a;
    ba.read_pes = {i};
    ba.write_pes = {i};
    rig.ma.push_back(&ctx.sys->add_master(ba, spec.master, ctx.kernel));
    BundleBinding bb;
    bb.master = rig.b[i];
    bb.target_pcs = rig.b;
    bb.read_pes = {i};
    bb.write_pes = {i};
    rig.mb.push_back(&ctx.sys->add_master(bb, spec.master, ctx.kernel));
  }
  return rig;
}

/// Per-PE region starts: equal slices of the PC, the i-th shifted by i pages
/// so the PEs start in different banks.
std::vector<std::uint64_t> region_bases(const PlatformProfile& profile) {
  std::vector<std::uint64_t> bases(kWays);
  const std::uint64_t slice = profile.pc_capacity / kWays;
  for (unsigned i = 0; i < kWays; ++i) bases[i] = i * slice + i * profile.page_size;
  return bases;
}

/// Room left in a region after the largest offset region_bases() applies.
std::uint64_t region_room(const PlatformProfile& profile) {
  return profile.pc_capacity / kWays - kWays * profile.page_size;
}

std::string arch_pattern(const WorkloadSpec& spec) {
  return spec.arch == Arch::bica ? "bica_blen" + std::to_string(spec.blen) : "baseline";
}

}  // namespace

BandwidthReport run_bucket_sort(const PlatformProfile& profile, const WorkloadSpec& spec) {
  spec.validate(profile);
  if (spec.arch == Arch::bipa) throw ConfigError("bucket_sort: arch must be baseline or bica");
  RunContext ctx(profile, spec);
  BandwidthReport rep = detail::base_report(profile, spec, ctx);
  rep.pattern = arch_pattern(spec);
  rep.pe_num = kWays;
  rep.pc_num = 2 * kWays;
  if (spec.arch == Arch::baseline) rep.blen = 1;

  SortRig rig = make_rig(ctx, profile, spec);
  const unsigned lb = ctx.data_width / 8;
  const std::uint64_t n = spec.bytes_per_pc / lb;
  if (n * lb > region_room(profile)) throw ConfigError("bucket_sort: bytes_per_pc exceeds the per-PE bucket region");

  const std::uint64_t seed = spec.seed;
  const std::optional<unsigned> forced = spec.single_bucket;
  auto key_at = [seed, forced](unsigned pc, std::uint64_t line) {
    std::uint64_t k = detail::mix64(detail::mix64(seed, 0xb0c4e7ULL + pc), line);
    if (forced) k = (k >> 3) | (std::uint64_t{*forced} << 61);
    return Line{k, (std::uint64_t{pc} << 40) | line};
  };
  for (unsigned i = 0; i < kWays; ++i) {
    const unsigned pc = rig.a[i];
    ctx.sys->memory(pc).set_initializer([key_at, pc](std::uint64_t line) { return key_at(pc, line); });
  }

  Scatter::Config cfg;
  cfg.arch = spec.arch;
  cfg.blen = spec.blen;
  cfg.fifo_depth = spec.fifo_depth;
  cfg.src = rig.a;
  cfg.dst = rig.b;
  cfg.rd = rig.ma;
  cfg.wr = rig.mb;
  cfg.input.assign(kWays, {Segment{0, n}});
  cfg.page_size = profile.page_size;
  cfg.region_base = region_bases(profile);
  cfg.bucket_of = [](const Line& l) { return static_cast<unsigned>(l.word >> 61); };
  Scatter sc(ctx, cfg);
  sc.start(SimTime{});
  ctx.run();

  // Oracle: bucket b of PE i holds exactly PE i's keys with top bits b, in
  // input order.
  bool ok = sc.drained();
  for (unsigned i = 0; ok && i < kWays; ++i) {
    std::vector<std::uint64_t> pos(kWays, 0);
    for (std::uint64_t line = 0; ok && line < n; ++line) {
      const Line k = key_at(rig.a[i], line);
      const unsigned b = static_cast<unsigned>(k.word >> 61);
      const Line got = ctx.sys->memory(rig.b[b]).read(sc.place(i, pos[b]++ * lb));
      if (!(got == k)) ok = false;
    }
    for (unsigned b = 0; ok && b < kWays; ++b)
      if (pos[b] != sc.count(b, i)) ok = false;
  }
  rep.bytes_read = sc.bytes_read;
  rep.bytes_written = sc.bytes_written;
  rep.correct = ok;
  ctx.finish(rep, sc.end);
  return rep;
}

BandwidthReport run_radix_sort(const PlatformProfile& profile, const WorkloadSpec& spec) {
  spec.validate(profile);
  if (spec.arch == Arch::bipa) throw ConfigError("radix_sort: arch must be baseline or bica");
  RunContext ctx(profile, spec);
  BandwidthReport rep = detail::base_report(profile, spec, ctx);
  rep.pattern = arch_pattern(spec);
  rep.pe_num = kWays;
  rep.pc_num = 2 * kWays;
  if (spec.arch == Arch::baseline) rep.blen = 1;

  SortRig rig = make_rig(ctx, profile, spec);
  const unsigned lb = ctx.data_width / 8;
  const std::uint64_t n = spec.bytes_per_pc / lb;
  if (n * lb > region_room(profile)) throw ConfigError("radix_sort: bytes_per_pc exceeds the per-PE bucket region");
  const std::uint64_t mask = (std::uint64_t{1} << spec.key_bits) - 1;
  const unsigned passes = spec.key_bits / 3;

  // Reference sequence: PE i's input is the i-th block of the global order.
  std::vector<Line> ref;
  ref.reserve(n * kWays);
  std::mt19937_64 rng(spec.seed);
  for (std::uint64_t g = 0; g < n * kWays; ++g) {
    const std::uint64_t key = spec.presorted ? (g * (mask + 1) / (n * kWays)) & mask : rng() & mask;
    ref.push_back(Line{key, g});
  }
  for (unsigned i = 0; i < kWays; ++i)
    for (std::uint64_t l = 0; l < n; ++l) ctx.sys->memory(rig.a[i]).write(l * lb, ref[i * n + l]);

  std::vector<Line> sorted = ref;
  std::stable_sort(sorted.begin(), sorted.end(), [](const Line& x, const Line& y) { return x.word < y.word; });

  std::vector<std::vector<Segment>> input(kWays, {Segment{0, n}});
  bool ok = true;
  SimTime end{};
  bool forward = true;  // group a -> group b
  for (unsigned p = 0; p < passes && ok; ++p) {
    Scatter::Config cfg;
    cfg.arch = spec.arch;
    cfg.blen = spec.blen;
    cfg.fifo_depth = spec.fifo_depth;
    cfg.src = forward ? rig.a : rig.b;
    cfg.dst = forward ? rig.b : rig.a;
    cfg.rd = forward ? rig.ma : rig.mb;
    cfg.wr = forward ? rig.mb : rig.ma;
    cfg.input = input;
    cfg.page_size = profile.page_size;
    cfg.region_base = region_bases(profile);
    const unsigned shift = 3 * p;
    cfg.bucket_of = [shift](const Line& l) { return static_cast<unsigned>((l.word >> shift) & 7); };
    Scatter sc(ctx, cfg);
    sc.start(ctx.edge(ctx.sys->engine().now()));
    ctx.run();
    ok = ok && sc.drained();
    rep.bytes_read += sc.bytes_read;
    rep.bytes_written += sc.bytes_written;
    end = max(end, sc.end);

    // Stable partition of the reference by this digit; the device layout
    // (bucket PC, then PE slice) must reproduce it exactly.
    std::vector<Line> next;
    next.reserve(ref.size());
    for (unsigned d = 0; d < kWays; ++d)
      for (const Line& l : ref)
        if (((l.word >> shift) & 7) == d) next.push_back(l);
    ref.swap(next);

    std::uint64_t g = 0;
    for (unsigned b = 0; b < kWays && ok; ++b) {
      input[b].clear();
      for (unsigned i = 0; i < kWays && ok; ++i) {
        const std::uint64_t c = sc.count(b, i);
        input[b].push_back(Segment{0, c, static_cast<int>(i)});
        for (std::uint64_t l = 0; l < c && ok; ++l)
          if (!(ctx.sys->memory(cfg.dst[b]).read(sc.place(i, l * lb)) == ref[g++])) ok = false;
      }
    }
    if (g != ref.size()) ok = false;
    forward = !forward;
  }
  // After the last pass the device order must be the stable sort of the input.
  if (ok && ref != sorted) ok = false;

  rep.correct = ok;
  ctx.finish(rep, end);
  return rep;
}

}  // namespace hbmsim
