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

// Sequential, strided, unicast and pointer-chase microbenchmarks.

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "workload_common.hpp"

namespace hbmsim {

using detail::RunContext;

namespace {

/**
 * One read stream feeding an optional write stream through the same or
 * another master. Requests are handed to the master a few at a time so the
 * queue in front of the outstanding window stays short; a pending write
 * backlog holds reads back the way a full dataflow FIFO would.
 */
struct CopyStream {
  RunContext* ctx = nullptr;
  AxiMaster* rd = nullptr;
  AxiMaster* wr = nullptr;
  unsigned read_pc = 0;
  unsigned write_pc = 0;
  std::uint64_t read_base = 0;
  std::vector<unsigned> bursts;  // beats per burst, in order
  std::vector<std::uint64_t> offsets;
  std::size_t next = 0;
  unsigned reads_pending = 0;
  unsigned writes_pending = 0;
  bool do_read = true;
  bool do_write = true;
  /// Maps (read offset) to (write pc, write address) for the write side.
  std::function<std::pair<unsigned, std::uint64_t>(std::uint64_t)> dest;

  std::uint64_t seed = 0;
  std::uint64_t checksum = 0;
  std::uint64_t expected = 0;
  std::uint64_t bytes_read = 0;
  std::uint64_t bytes_written = 0;
  SimTime end{};

  void init_bursts(std::uint64_t bytes, const AxiMasterProfile& master, unsigned beat_bytes) {
    AccessStream s;
    s.total_beats = bytes / beat_bytes;
    bursts = infer_burst(master, s);
    offsets.reserve(bursts.size());
    std::uint64_t off = 0;
    for (unsigned b : bursts) {
      offsets.push_back(off);
      off += std::uint64_t{b} * beat_bytes;
    }
  }

  unsigned read_limit() const { return rd->profile().max_outstanding_reads + 2; }
  unsigned write_limit() const { return wr->profile().max_outstanding_writes + 2; }

  void pump() {
    while (next < bursts.size()) {
      if (do_read && reads_pending >= read_limit()) return;
      if (do_write && writes_pending >= write_limit()) return;
      const std::size_t i = next++;
      if (do_read)
        issue_read(i);
      else
        issue_write(i, {});
    }
  }

  void issue_read(std::size_t i) {
    ++reads_pending;
    MemRequest req = ctx->request(AccessKind::read, read_pc, read_base + offsets[i], bursts[i]);
    const std::uint64_t off = offsets[i];
    rd->submit(std::move(req), {}, [this, off](const MemRequest& r, std::vector<Line>&& data, SimTime done) {
      --reads_pending;
      bytes_read += r.bytes();
      end = max(end, done);
      const std::uint64_t beat_bytes = r.beat_width / 8;
      const unsigned line_bytes = ctx->sys->memory(r.pc).line_bytes();
      for (std::size_t k = 0; k < data.size(); ++k) {
        checksum += detail::mix64(data[k].word);
        expected += detail::mix64(detail::source_line(seed, r.pc, (r.address + k * beat_bytes) / line_bytes).word);
      }
      if (do_write) write_back(off, r.burst_len, std::move(data));
      pump();
    });
  }

  void issue_write(std::size_t i, std::vector<Line> payload) {
    const std::uint64_t off = offsets[i];
    if (payload.empty()) {
      const unsigned beat_bytes = ctx->data_width / 8;
      const unsigned line_bytes = ctx->sys->memory(read_pc).line_bytes();
      for (unsigned k = 0; k < bursts[i]; ++k)
        payload.push_back(detail::source_line(seed, read_pc, (read_base + off + k * beat_bytes) / line_bytes));
    }
    write_back(off, bursts[i], std::move(payload));
  }

  void write_back(std::uint64_t off, unsigned blen, std::vector<Line> payload) {
    ++writes_pending;
    auto [pc, addr] = dest(off);
    MemRequest req = ctx->request(AccessKind::write, pc, addr, blen);
    wr->submit(std::move(req), std::move(payload), [this](const MemRequest& r, std::vector<Line>&&, SimTime done) {
      --writes_pending;
      bytes_written += r.bytes();
      end = max(end, done);
      pump();
    });
  }
};

void init_source(RunContext& ctx, unsigned pc, std::uint64_t seed) {
  ctx.sys->memory(pc).set_initializer([seed, pc](std::uint64_t line) { return detail::source_line(seed, pc, line); });
}

/// Every written line of [dst, dst+bytes) in `dst_pc` must equal the source
/// line it was copied from.
bool verify_copy(RunContext& ctx, unsigned src_pc, std::uint64_t src, unsigned dst_pc, std::uint64_t dst,
                 std::uint64_t bytes, std::uint64_t seed) {
  SparseMemory& m = ctx.sys->memory(dst_pc);
  const unsigned lb = m.line_bytes();
  for (std::uint64_t o = 0; o < bytes; o += lb)
    if (!(m.read(dst + o) == detail::source_line(seed, src_pc, (src + o) / lb))) return false;
  return true;
}

}  // namespace

BandwidthReport run_seq_copy(const PlatformProfile& profile, const WorkloadSpec& spec) {
  spec.validate(profile);
  RunContext ctx(profile, spec);
  BandwidthReport rep = detail::base_report(profile, spec, ctx);
  rep.pattern = to_string(spec.mode);
  rep.pe_num = 1;

  const std::vector<unsigned> pcs = spec.read_pcs.empty() ? detail::default_pcs(profile, spec.pc_num) : spec.read_pcs;
  // An explicit write list pairs PC i with write_pcs[i]; otherwise each PC
  // copies into its own upper half.
  const bool paired = !spec.write_pcs.empty();
  if (paired && (spec.mode != CopyMode::read_write || spec.write_pcs.size() != pcs.size()))
    throw ConfigError("seq_copy: write_pcs needs read_write mode and one entry per read PC");
  if (paired) {
    std::set<unsigned> seen(pcs.begin(), pcs.end());
    for (unsigned pc : spec.write_pcs)
      if (!seen.insert(pc).second) throw ConfigError("seq_copy: write_pcs must be distinct and disjoint from the read PCs");
  }
  const unsigned beat_bytes = ctx.data_width / 8;
  if (spec.bytes_per_pc % beat_bytes) throw ConfigError("seq_copy: bytes_per_pc must be a multiple of the beat size");
  // Reads and writes advance in lockstep, so the write half starts half the
  // banks away; otherwise single-beat copies ping-pong rows in one bank.
  const std::uint64_t skew = std::uint64_t{profile.banks_per_pc / 2} * profile.page_size;
  const std::uint64_t write_base = spec.mode == CopyMode::read_write && !paired ? profile.pc_capacity / 2 + skew : 0;
  if (spec.mode == CopyMode::read_write && !paired && spec.bytes_per_pc > profile.pc_capacity / 2 - skew)
    throw ConfigError("seq_copy: read_write copies need bytes_per_pc <= half the PC capacity");

  std::vector<std::unique_ptr<CopyStream>> streams;
  for (std::size_t i = 0; i < pcs.size(); ++i) {
    const unsigned pc = pcs[i];
    const unsigned dst_pc = paired ? spec.write_pcs[i] : pc;
    BundleBinding b;
    b.master = pc;
    b.target_pcs = {pc};
    if (spec.mode != CopyMode::write_only) b.read_pes = {pc};
    if (spec.mode != CopyMode::read_only && !paired) b.write_pes = {pc};
    AxiMaster& m = ctx.sys->add_master(b, spec.master, ctx.kernel);
    AxiMaster* wm = &m;
    if (paired) {
      // the write side sits next to its PC, like a unicast writer
      BundleBinding wb;
      wb.master = dst_pc;
      wb.target_pcs = {dst_pc};
      wb.write_pes = {pc};
      wm = &ctx.sys->add_master(wb, spec.master, ctx.kernel);
    }
    init_source(ctx, pc, spec.seed);

    auto s = std::make_unique<CopyStream>();
    s->ctx = &ctx;
    s->rd = &m;
    s->wr = wm;
    s->read_pc = pc;
    s->seed = spec.seed;
    s->do_read = spec.mode != CopyMode::write_only;
    s->do_write = spec.mode != CopyMode::read_only;
    s->write_pc = dst_pc;
    s->dest = [dst_pc, write_base](std::uint64_t off) { return std::make_pair(dst_pc, write_base + off); };
    s->init_bursts(spec.bytes_per_pc, m.profile(), beat_bytes);
    streams.push_back(std::move(s));
  }
  for (auto& s : streams) s->pump();
  ctx.run();

  bool ok = true;
  SimTime end{};
  for (auto& s : streams) {
    if (s->next != s->bursts.size() || s->reads_pending || s->writes_pending) ok = false;
    if (s->do_read && s->checksum != s->expected) ok = false;
    if (s->do_write && !verify_copy(ctx, s->read_pc, 0, s->write_pc, write_base, spec.bytes_per_pc, spec.seed))
      ok = false;
    rep.bytes_read += s->bytes_read;
    rep.bytes_written += s->bytes_written;
    end = max(end, s->end);
  }
  rep.pc_num = static_cast<unsigned>(pcs.size());
  rep.blen = streams.empty() || streams[0]->bursts.empty() ? 0 : streams[0]->bursts[0];
  rep.correct = ok;
  ctx.finish(rep, end);
  return rep;
}

BandwidthReport run_strided(const PlatformProfile& profile, const WorkloadSpec& spec) {
  spec.validate(profile);
  RunContext ctx(profile, spec);
  BandwidthReport rep = detail::base_report(profile, spec, ctx);
  rep.pattern = "stride_" + std::to_string(spec.stride);
  rep.blen = 1;
  rep.pe_num = 1;

  const std::vector<unsigned> pcs = spec.read_pcs.empty() ? detail::default_pcs(profile, spec.pc_num) : spec.read_pcs;
  const unsigned beat_bytes = ctx.data_width / 8;
  const std::uint64_t accesses = spec.bytes_per_pc / beat_bytes;

  std::vector<std::unique_ptr<CopyStream>> streams;
  for (unsigned pc : pcs) {
    BundleBinding b;
    b.master = pc;
    b.target_pcs = {pc};
    b.read_pes = {pc};
    AxiMaster& m = ctx.sys->add_master(b, spec.master, ctx.kernel);
    init_source(ctx, pc, spec.seed);

    auto s = std::make_unique<CopyStream>();
    s->ctx = &ctx;
    s->rd = &m;
    s->wr = &m;
    s->read_pc = pc;
    s->seed = spec.seed;
    s->do_write = false;
    // A stride wider than one beat breaks every burst.
    const std::uint64_t span = profile.pc_capacity - profile.pc_capacity % spec.stride;
    s->bursts.assign(accesses, 1U);
    s->offsets.reserve(accesses);
    for (std::uint64_t k = 0; k < accesses; ++k) s->offsets.push_back((k * spec.stride) % span);
    streams.push_back(std::move(s));
  }
  for (auto& s : streams) s->pump();
  ctx.run();

  bool ok = true;
  SimTime end{};
  for (auto& s : streams) {
    if (s->next != s->bursts.size() || s->reads_pending || s->checksum != s->expected) ok = false;
    rep.bytes_read += s->bytes_read;
    end = max(end, s->end);
  }
  rep.pc_num = static_cast<unsigned>(pcs.size());
  rep.correct = ok;
  ctx.finish(rep, end);
  return rep;
}

BandwidthReport run_unicast(const PlatformProfile& profile, const WorkloadSpec& spec) {
  spec.validate(profile);
  RunContext ctx(profile, spec);
  BandwidthReport rep = detail::base_report(profile, spec, ctx);
  const unsigned n = spec.pattern;
  rep.pattern = std::to_string(n) + "x" + std::to_string(n);
  rep.pe_num = 8;

  std::vector<unsigned> rd_pcs = spec.read_pcs, wr_pcs = spec.write_pcs;
  if (rd_pcs.empty())
    for (unsigned i = 0; i < 8; ++i) rd_pcs.push_back(i);
  if (wr_pcs.empty())
    for (unsigned i = 8; i < 16; ++i) wr_pcs.push_back(i);
  if (rd_pcs.size() != 8 || wr_pcs.size() != 8) throw ConfigError("unicast: needs 8 read PCs and 8 write PCs");

  const unsigned beat_bytes = ctx.data_width / 8;
  const std::uint64_t share = spec.bytes_per_pc / n;
  const std::uint64_t chunk = std::min<std::uint64_t>(64 * 1024, share);
  if (spec.bytes_per_pc % (std::uint64_t{n} * chunk) || chunk % beat_bytes)
    throw ConfigError("unicast: bytes_per_pc must split into n equal chunk-aligned shares");

  std::vector<std::unique_ptr<CopyStream>> streams;
  for (unsigned i = 0; i < 8; ++i) {
    const unsigned g = i / n, li = i % n;
    std::vector<unsigned> group(wr_pcs.begin() + g * n, wr_pcs.begin() + (g + 1) * n);

    BundleBinding rb;
    rb.master = rd_pcs[i];
    rb.target_pcs = {rd_pcs[i]};
    rb.read_pes = {i};
    AxiMaster& rm = ctx.sys->add_master(rb, spec.master, ctx.kernel);
    BundleBinding wb;
    wb.master = wr_pcs[i];
    wb.target_pcs = group;
    wb.write_pes = {i};
    AxiMaster& wm = ctx.sys->add_master(wb, spec.master, ctx.kernel);
    init_source(ctx, rd_pcs[i], spec.seed);

    auto s = std::make_unique<CopyStream>();
    s->ctx = &ctx;
    s->rd = &rm;
    s->wr = &wm;
    s->read_pc = rd_pcs[i];
    s->seed = spec.seed;
    // Chunk k goes to group[(li + k) mod n]; each write PC holds one equal
    // share per PE of the group.
    s->dest = [group, n, li, chunk, share](std::uint64_t off) {
      const std::uint64_t k = off / chunk;
      const unsigned pc = group[(li + k) % n];
      return std::make_pair(pc, li * share + (k / n) * chunk + off % chunk);
    };
    s->init_bursts(spec.bytes_per_pc, rm.profile(), beat_bytes);
    // A burst never spans two chunks.
    if (chunk % (std::uint64_t{s->bursts.front()} * beat_bytes)) throw ConfigError("unicast: chunk not burst aligned");
    streams.push_back(std::move(s));
  }
  for (auto& s : streams) s->pump();
  ctx.run();

  bool ok = true;
  SimTime end{};
  for (unsigned i = 0; i < 8; ++i) {
    auto& s = streams[i];
    if (s->next != s->bursts.size() || s->reads_pending || s->writes_pending || s->checksum != s->expected) ok = false;
    for (std::uint64_t off = 0; ok && off < spec.bytes_per_pc; off += chunk) {
      auto [pc, addr] = s->dest(off);
      if (!verify_copy(ctx, s->read_pc, off, pc, addr, chunk, spec.seed)) ok = false;
    }
    rep.bytes_read += s->bytes_read;
    rep.bytes_written += s->bytes_written;
    end = max(end, s->end);
  }
  rep.pc_num = 16;
  rep.blen = streams[0]->bursts.front();
  rep.correct = ok;
  ctx.finish(rep, end);
  return rep;
}

BandwidthReport run_pointer_chase(const PlatformProfile& profile, const WorkloadSpec& spec) {
  spec.validate(profile);
  RunContext ctx(profile, spec);
  BandwidthReport rep = detail::base_report(profile, spec, ctx);
  rep.pattern = "chain_" + std::to_string(spec.chain_length);
  rep.blen = 1;
  rep.pe_num = 1;
  rep.pc_num = 1;

  const unsigned pc = spec.read_pcs.empty() ? profile.usable_pcs().front() : spec.read_pcs.front();
  const std::uint64_t n = spec.chain_length;
  const unsigned line_bytes = ctx.sys->memory(pc).line_bytes();
  // Spread the nodes over the whole PC so consecutive nodes never share a page.
  const std::uint64_t spacing_lines = std::max<std::uint64_t>(1, profile.pc_capacity / line_bytes / n);
  if (n * spacing_lines * line_bytes > profile.pc_capacity) throw ConfigError("pointer_chase: chain does not fit the PC");

  // Single random cycle (Sattolo) over the node slots.
  std::vector<std::uint64_t> next(n);
  for (std::uint64_t i = 0; i < n; ++i) next[i] = i;
  std::mt19937_64 rng(spec.seed);
  for (std::uint64_t i = n - 1; i > 0; --i) std::swap(next[i], next[detail::below(rng, i)]);
  auto shared_next = std::make_shared<std::vector<std::uint64_t>>(next);
  ctx.sys->memory(pc).set_initializer([shared_next, spacing_lines, line_bytes](std::uint64_t line) {
    if (line % spacing_lines) return Line{};
    const std::uint64_t node = line / spacing_lines;
    if (node >= shared_next->size()) return Line{};
    return Line{(*shared_next)[node] * spacing_lines * line_bytes, node};
  });

  BundleBinding b;
  b.master = pc;
  b.target_pcs = {pc};
  b.read_pes = {0};
  AxiMaster& m = ctx.sys->add_master(b, spec.master, ctx.kernel);

  struct Chase {
    std::uint64_t node = 0;
    std::uint64_t done = 0;
    bool ok = true;
    SimTime end{};
  };
  auto st = std::make_shared<Chase>();
  const unsigned beats = 1;
  std::function<void(SimTime)> step = [&](SimTime at) {
    ctx.sys->engine().schedule(at, [&, st] {
      MemRequest req = ctx.request(AccessKind::read, pc, st->node * spacing_lines * line_bytes, beats);
      m.submit(std::move(req), {}, [&, st](const MemRequest& r, std::vector<Line>&& data, SimTime done) {
        const std::uint64_t expect = next[st->node];
        if (data.front().word != expect * spacing_lines * line_bytes) st->ok = false;
        st->node = expect;
        st->end = done;
        rep.bytes_read += r.bytes();
        if (++st->done < n) step(done + ctx.cycles(ctx.lat_pe_cycles));
      });
    });
  };
  step(SimTime{});
  ctx.run();

  rep.correct = st->ok && st->done == n && st->node == 0;
  // The dependent chain ends when the last datum reaches the PE.
  const SimTime end = st->end + ctx.cycles(ctx.lat_pe_cycles);
  ctx.finish(rep, end);
  const double lat = end.ns() / static_cast<double>(n);
  rep.latency_ns = lat;
  rep.lat_pe_ns = ctx.cycles(ctx.lat_pe_cycles).ns();
  rep.lat_mem_ns = lat - *rep.lat_pe_ns;
  return rep;
}

}  // namespace hbmsim
