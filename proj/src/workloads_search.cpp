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

// Latency-bound searches: binary search and depth-first tree traversal.
// Each PC serves its own PEs, either one PE straight on the AXI master or
// several PEs behind a BIPA arbiter.

#include <algorithm>
#include <functional>
#include <numeric>

#include "hbmsim/arbitrators.hpp"
#include "workload_common.hpp"

namespace hbmsim {

using detail::RunContext;

namespace {

constexpr unsigned kSearchDepth = 18;
constexpr std::uint64_t kArrayLen = std::uint64_t{1} << kSearchDepth;
constexpr std::uint32_t kNil = 0xffffffffU;
// One spare line after every 1024 elements. Without it the upper probe
// levels of a power-of-two array all land in the same bank.
constexpr std::uint64_t kPadEvery = 1024;

constexpr std::uint64_t padded_line(std::uint64_t i) { return i + i / kPadEvery; }

/// A PE's dependent access stream: the next address is known only after the
/// previous datum arrives.
struct Walker {
  /// First address, or nullopt if the PE has no work.
  std::function<std::optional<std::uint64_t>()> start;
  /// Consumes one datum; returns the next address or nullopt when done.
  std::function<std::optional<std::uint64_t>(const Line&)> step;
};

/// Drives the walkers of one PC, direct or through BIPA, and counts bytes.
class PcPort {
 public:
  PcPort(RunContext& ctx, unsigned pc, AxiMaster& master, std::vector<Walker> walkers, const WorkloadSpec& spec)
      : ctx_(ctx), pc_(pc), m_(master), walkers_(std::move(walkers)) {
    if (spec.arch == Arch::bipa) {
      BipaConfig bc;
      bc.pe_count = static_cast<unsigned>(walkers_.size());
      bc.data_width = ctx.data_width;
      bc.arbitration_cost = spec.arbitration_cost;
      bc.response_routing_cost = spec.response_routing_cost;
      bipa_ = std::make_unique<Bipa>(bc);
    }
  }

  void start() {
    for (unsigned pe = 0; pe < walkers_.size(); ++pe) {
      if (auto a = walkers_[pe].start()) issue(pe, *a, SimTime{});
    }
  }

  std::uint64_t bytes_read = 0;
  std::uint64_t probes = 0;
  SimTime end{};
  const Bipa* bipa() const { return bipa_.get(); }

 private:
  void issue(unsigned pe, std::uint64_t addr, SimTime at) {
    ctx_.sys->engine().schedule(at, [this, pe, addr] {
      if (bipa_) {
        bipa_->push_request(pe, addr);
        wake_arbiter();
      } else {
        submit(pe, addr, std::nullopt);
      }
    });
  }

  void submit(unsigned pe, std::uint64_t addr, std::optional<std::uint64_t> tag) {
    MemRequest req = ctx_.request(AccessKind::read, pc_, addr, 1, tag ? 0 : pe);
    m_.submit(std::move(req), {}, [this, pe, tag](const MemRequest& r, std::vector<Line>&& data, SimTime done) {
      bytes_read += r.bytes();
      ++probes;
      if (!tag) {
        deliver(pe, data.front(), done);
        return;
      }
      // One response per cycle leaves the demux, after a PE-count deep walk.
      router_free_ = max(ctx_.edge(done), router_free_);
      const SimTime at = router_free_ + ctx_.cycles(bipa_->response_latency_cycles());
      router_free_ += ctx_.kernel.period();
      const unsigned owner = bipa_->route_response(*tag);
      const Line datum = data.front();
      ctx_.sys->engine().schedule(at, [this, owner, datum] { deliver(owner, datum, ctx_.sys->engine().now()); });
      wake_arbiter();
    });
  }

  void deliver(unsigned pe, const Line& datum, SimTime at) {
    end = max(end, at + ctx_.cycles(ctx_.lat_pe_cycles));
    if (auto a = walkers_[pe].step(datum)) issue(pe, *a, at + ctx_.cycles(ctx_.lat_pe_cycles));
  }

  void wake_arbiter() {
    if (arb_pending_) return;
    arb_pending_ = true;
    const SimTime at = max(ctx_.edge(ctx_.sys->engine().now()), arb_next_);
    ctx_.sys->engine().schedule(at, [this] {
      arb_pending_ = false;
      arbitrate();
    });
  }

  void arbitrate() {
    const SimTime now = ctx_.sys->engine().now();
    if (!bipa_->any_pending()) return;
    const std::uint64_t window = m_.profile().max_outstanding_reads;
    if (m_.in_flight(AccessKind::read) + m_.queued(AccessKind::read) + issuing_ >= window) return;  // a response wakes us
    unsigned scanned = 0;
    std::optional<BipaGrant> g = bipa_->arbitrate(&scanned);
    if (!g) return;
    const SimTime at = now + ctx_.cycles(std::uint64_t{scanned} * bipa_->config().arbitration_cost);
    ++issuing_;
    const BipaGrant grant = *g;
    ctx_.sys->engine().schedule(at, [this, grant] {
      --issuing_;
      submit(grant.pe, grant.address, grant.tag);
    });
    arb_next_ = at + ctx_.kernel.period();
    if (bipa_->any_pending()) wake_arbiter();
  }

  RunContext& ctx_;
  unsigned pc_;
  AxiMaster& m_;
  std::vector<Walker> walkers_;
  std::unique_ptr<Bipa> bipa_;
  bool arb_pending_ = false;
  SimTime arb_next_{};
  SimTime router_free_{};
  std::uint64_t issuing_ = 0;
};

struct SearchRig {
  std::vector<unsigned> pcs;
  std::vector<AxiMaster*> masters;
};

SearchRig make_search_rig(RunContext& ctx, const PlatformProfile& profile, const WorkloadSpec& spec) {
  if (spec.arch == Arch::bica) throw ConfigError(std::string(to_string(spec.kind)) + ": arch must be baseline or bipa");
  SearchRig rig;
  rig.pcs = spec.read_pcs.empty() ? detail::default_pcs(profile, spec.pc_num) : spec.read_pcs;
  for (unsigned pc : rig.pcs) {
    BundleBinding b;
    b.master = pc;
    b.target_pcs = {pc};
    // BIPA presents one port to the master; without it every PE needs its own.
    if (spec.arch == Arch::bipa) {
      b.read_pes = {0};
    } else {
      b.read_pes.resize(spec.pes_per_pc);
      std::iota(b.read_pes.begin(), b.read_pes.end(), 0U);
    }
    rig.masters.push_back(&ctx.sys->add_master(b, spec.master, ctx.kernel));
  }
  return rig;
}

std::string search_pattern(const WorkloadSpec& spec) {
  return spec.arch == Arch::bipa ? "bipa_pe" + std::to_string(spec.pes_per_pc) : "baseline";
}

/// Runs all ports to completion and fills the report.
void run_ports(RunContext& ctx, std::vector<std::unique_ptr<PcPort>>& ports, BandwidthReport& rep) {
  for (auto& p : ports) p->start();
  ctx.run();
  SimTime end{};
  for (auto& p : ports) {
    rep.bytes_read += p->bytes_read;
    end = max(end, p->end);
  }
  ctx.finish(rep, end);
}

}  // namespace

BandwidthReport run_binary_search(const PlatformProfile& profile, const WorkloadSpec& spec) {
  spec.validate(profile);
  RunContext ctx(profile, spec);
  BandwidthReport rep = detail::base_report(profile, spec, ctx);
  rep.pattern = search_pattern(spec);
  rep.blen = 1;
  SearchRig rig = make_search_rig(ctx, profile, spec);
  rep.pc_num = static_cast<unsigned>(rig.pcs.size());

  const unsigned lb = ctx.sys->memory(rig.pcs.front()).line_bytes();
  if (padded_line(kArrayLen) * lb > profile.pc_capacity) throw ConfigError("binary_search: array does not fit the PC");
  const std::uint64_t queries = std::max<std::uint64_t>(1, spec.bytes_per_pc / (std::uint64_t{lb} * kSearchDepth));
  const unsigned pes = spec.pes_per_pc;

  struct Query {
    std::uint64_t target = 0;
    std::uint64_t pos = 0;
    unsigned level = 0;
  };
  struct PeState {
    std::vector<std::uint64_t> targets;
    std::size_t next = 0;
    Query q;
    std::vector<std::uint64_t> results;
  };
  // per PC, per PE
  std::vector<std::vector<std::shared_ptr<PeState>>> states(rig.pcs.size());
  std::vector<std::unique_ptr<PcPort>> ports;
  const std::uint64_t seed = spec.seed;

  for (std::size_t k = 0; k < rig.pcs.size(); ++k) {
    const unsigned pc = rig.pcs[k];
    // Strictly increasing: value(i) = 4 i + (hash & 3).
    auto value = [seed, pc](std::uint64_t i) { return 4 * i + (detail::mix64(detail::mix64(seed, 0x5ea2c4ULL + pc), i) & 3); };
    ctx.sys->memory(pc).set_initializer([value](std::uint64_t line) {
      // Inverse of padded_line; pad lines read as zero.
      if ((line + 1) % (kPadEvery + 1) == 0) return Line{};
      const std::uint64_t i = line - line / (kPadEvery + 1);
      return i < kArrayLen ? Line{value(i), i} : Line{};
    });
    std::mt19937_64 rng(detail::mix64(seed, 0x9e7ULL + pc));
    std::vector<Walker> walkers;
    for (unsigned pe = 0; pe < pes; ++pe) {
      auto st = std::make_shared<PeState>();
      // Targets stay within the last element so 18 probes decide every answer.
      for (std::uint64_t qi = pe; qi < queries; qi += pes) st->targets.push_back(detail::below(rng, 4 * (kArrayLen - 1) + 1));
      states[k].push_back(st);
      auto probe = [lb](const Query& q) { return padded_line(q.pos + (kArrayLen >> (q.level + 1)) - 1) * lb; };
      Walker w;
      w.start = [st, probe]() -> std::optional<std::uint64_t> {
        if (st->targets.empty()) return std::nullopt;
        st->q = Query{st->targets[st->next++], 0, 0};
        return probe(st->q);
      };
      w.step = [st, probe](const Line& datum) -> std::optional<std::uint64_t> {
        Query& q = st->q;
        if (datum.word < q.target) q.pos += kArrayLen >> (q.level + 1);
        if (++q.level < kSearchDepth) return probe(q);
        st->results.push_back(q.pos);
        if (st->next == st->targets.size()) return std::nullopt;
        q = Query{st->targets[st->next++], 0, 0};
        return probe(q);
      };
      walkers.push_back(std::move(w));
    }
    ports.push_back(std::make_unique<PcPort>(ctx, pc, *rig.masters[k], std::move(walkers), spec));
  }
  run_ports(ctx, ports, rep);

  // Oracle: every answer equals std::lower_bound over the host copy.
  bool ok = true;
  std::vector<std::uint64_t> host(kArrayLen);
  for (std::size_t k = 0; k < rig.pcs.size() && ok; ++k) {
    const unsigned pc = rig.pcs[k];
    for (std::uint64_t i = 0; i < kArrayLen; ++i)
      host[i] = 4 * i + (detail::mix64(detail::mix64(seed, 0x5ea2c4ULL + pc), i) & 3);
    for (const auto& st : states[k]) {
      if (st->results.size() != st->targets.size()) {
        ok = false;
        break;
      }
      for (std::size_t i = 0; i < st->targets.size(); ++i) {
        const auto it = std::lower_bound(host.begin(), host.end(), st->targets[i]);
        if (static_cast<std::uint64_t>(it - host.begin()) != st->results[i]) ok = false;
      }
    }
  }
  rep.correct = ok;
  return rep;
}

namespace {

/// Host image of one random binary search tree.
struct Tree {
  std::vector<std::uint64_t> value;
  std::vector<std::uint32_t> left, right;
  std::uint32_t root = kNil;

  void build(std::uint64_t n, std::mt19937_64& rng) {
    std::vector<std::uint64_t> keys(n);
    std::iota(keys.begin(), keys.end(), 0);
    for (std::uint64_t i = n; i > 1; --i) std::swap(keys[i - 1], keys[detail::below(rng, i)]);
    value.assign(n, 0);
    left.assign(n, kNil);
    right.assign(n, kNil);
    for (std::uint32_t id = 0; id < n; ++id) {
      value[id] = keys[id];
      if (root == kNil) {
        root = id;
        continue;
      }
      std::uint32_t cur = root;
      for (;;) {
        auto& link = keys[id] < value[cur] ? left[cur] : right[cur];
        if (link == kNil) {
          link = id;
          break;
        }
        cur = link;
      }
    }
  }

  std::vector<std::uint64_t> preorder() const {
    std::vector<std::uint64_t> out;
    std::vector<std::uint32_t> stack;
    if (root != kNil) stack.push_back(root);
    while (!stack.empty()) {
      const std::uint32_t n = stack.back();
      stack.pop_back();
      out.push_back(value[n]);
      if (right[n] != kNil) stack.push_back(right[n]);
      if (left[n] != kNil) stack.push_back(left[n]);
    }
    return out;
  }
};

}  // namespace

BandwidthReport run_dfs(const PlatformProfile& profile, const WorkloadSpec& spec) {
  spec.validate(profile);
  RunContext ctx(profile, spec);
  BandwidthReport rep = detail::base_report(profile, spec, ctx);
  rep.pattern = search_pattern(spec);
  rep.blen = 1;
  SearchRig rig = make_search_rig(ctx, profile, spec);
  rep.pc_num = static_cast<unsigned>(rig.pcs.size());

  const unsigned lb = ctx.sys->memory(rig.pcs.front()).line_bytes();
  const unsigned pes = spec.pes_per_pc;
  const std::uint64_t total = spec.tree_nodes ? spec.tree_nodes : std::max<std::uint64_t>(pes, spec.bytes_per_pc / lb);
  const std::uint64_t per_pe = total / pes;
  if (per_pe == 0 || per_pe >= kNil) throw ConfigError("dfs: tree size must be in [1, 2^32) nodes per PE");
  // Slot s starts page s, so visits rarely share a page and every bank is
  // used; beyond one slot per page the slots wrap to the next line.
  const std::uint64_t lines_per_page = profile.page_size / lb;
  const std::uint64_t pages = profile.pc_capacity / profile.page_size;
  if (per_pe * pes > pages * lines_per_page) throw ConfigError("dfs: trees do not fit the PC");

  struct PeState {
    Tree tree;
    std::vector<std::uint64_t> slot;  // node id -> slot
    std::vector<std::uint32_t> stack;
    std::vector<std::uint64_t> visited;
  };
  struct PcImage {
    std::vector<std::shared_ptr<PeState>> pe;
    std::vector<std::uint32_t> owner;  // slot -> owning PE
    std::vector<std::uint32_t> node;   // slot -> node id
  };
  std::vector<std::shared_ptr<PcImage>> images;
  std::vector<std::unique_ptr<PcPort>> ports;

  for (std::size_t k = 0; k < rig.pcs.size(); ++k) {
    const unsigned pc = rig.pcs[k];
    std::mt19937_64 rng(detail::mix64(spec.seed, 0xdf5ULL + pc));
    auto img = std::make_shared<PcImage>();
    const std::uint64_t slots = per_pe * pes;
    std::vector<std::uint64_t> perm(slots);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::uint64_t i = slots; i > 1; --i) std::swap(perm[i - 1], perm[detail::below(rng, i)]);
    img->owner.assign(slots, 0);
    img->node.assign(slots, 0);
    std::vector<Walker> walkers;
    for (unsigned p = 0; p < pes; ++p) {
      auto st = std::make_shared<PeState>();
      st->tree.build(per_pe, rng);
      st->slot.resize(per_pe);
      for (std::uint64_t id = 0; id < per_pe; ++id) {
        const std::uint64_t s = perm[p * per_pe + id];
        st->slot[id] = s;
        img->owner[s] = p;
        img->node[s] = static_cast<std::uint32_t>(id);
      }
      img->pe.push_back(st);
      auto addr = [lb, lines_per_page, pages](std::uint64_t slot) {
        return ((slot % pages) * lines_per_page + slot / pages) * lb;
      };
      Walker w;
      w.start = [st, addr]() -> std::optional<std::uint64_t> {
        if (st->tree.root == kNil) return std::nullopt;
        return addr(st->slot[st->tree.root]);
      };
      w.step = [st, addr](const Line& rec) -> std::optional<std::uint64_t> {
        // record: value, then left and right child ids packed in aux
        st->visited.push_back(rec.word);
        const auto l = static_cast<std::uint32_t>(rec.aux >> 32);
        const auto r = static_cast<std::uint32_t>(rec.aux);
        if (r != kNil) st->stack.push_back(r);
        if (l != kNil) st->stack.push_back(l);
        if (st->stack.empty()) return std::nullopt;
        const std::uint32_t n = st->stack.back();
        st->stack.pop_back();
        return addr(st->slot[n]);
      };
      walkers.push_back(std::move(w));
    }
    images.push_back(img);
    ctx.sys->memory(pc).set_initializer([img, lines_per_page, pages, slots](std::uint64_t line) {
      const std::uint64_t s = (line % lines_per_page) * pages + line / lines_per_page;
      if (s >= slots) return Line{};
      const PeState& st = *img->pe[img->owner[s]];
      const std::uint32_t id = img->node[s];
      return Line{st.tree.value[id], (std::uint64_t{st.tree.left[id]} << 32) | st.tree.right[id]};
    });
    ports.push_back(std::make_unique<PcPort>(ctx, pc, *rig.masters[k], std::move(walkers), spec));
  }
  run_ports(ctx, ports, rep);

  // Oracle: the device visit order equals the host preorder.
  bool ok = true;
  for (const auto& img : images)
    for (const auto& st : img->pe)
      if (st->visited != st->tree.preorder()) ok = false;
  rep.correct = ok;
  return rep;
}

}  // namespace hbmsim
