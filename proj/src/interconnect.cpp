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

#include "hbmsim/interconnect.hpp"

#include <algorithm>
#include <memory>
#include <sstream>

#include "hbmsim/system.hpp"

namespace hbmsim {

bool BundleBinding::targets(unsigned pc) const {
  return std::find(target_pcs.begin(), target_pcs.end(), pc) != target_pcs.end();
}

void validate_binding(const PlatformProfile& profile, const BundleBinding& b) {
  std::ostringstream where;
  where << "bundle on master " << b.master << ": ";
  const unsigned ports = profile.crossbar.unit_switches * profile.crossbar.ports_per_switch;
  if (b.master >= ports) throw ConfigError(where.str() + "master index beyond the crossbar ports");
  if (b.target_pcs.empty()) throw ConfigError(where.str() + "needs at least one target PC");
  for (unsigned pc : b.target_pcs) {
    if (!profile.usable(pc)) {
      std::ostringstream msg;
      msg << where.str() << "PC " << pc << " is not usable on profile '" << profile.name << "'";
      throw ConfigError(msg.str());
    }
  }
  if (profile.enforce_bundle_rules && (b.read_pes.size() > 1 || b.write_pes.size() > 1)) {
    std::ostringstream msg;
    msg << where.str() << "only one read PE and one write PE can be connected to a bundle (got "
        << b.read_pes.size() << " read PEs, " << b.write_pes.size() << " write PEs)";
    throw ConfigError(msg.str());
  }
}

Crossbar::Crossbar(const CrossbarTopology& topo) : topo_(topo) {
  topo_.validate();
  hops_.resize(topo_.unit_switches > 0 ? topo_.unit_switches - 1 : 0);
}

unsigned Crossbar::hops(unsigned master, unsigned pc) const {
  unsigned a = topo_.switch_of(master);
  unsigned b = topo_.switch_of(pc);
  return a > b ? a - b : b - a;
}

SimTime Crossbar::route(unsigned master, unsigned pc, std::uint64_t bytes, SimTime now, LinkDirection dir) {
  unsigned from = topo_.switch_of(master);
  unsigned to = topo_.switch_of(pc);
  if (dir == LinkDirection::pc_to_master) std::swap(from, to);
  if (from == to) return SimTime{};
  const bool rightward = from < to;
  const int side = rightward ? 0 : 1;
  const SimTime xfer = topo_.lateral_bw > 0 ? SimTime::transfer(static_cast<double>(bytes), topo_.lateral_bw) : SimTime{};
  SimTime t = now;
  unsigned sw = from;
  while (sw != to) {
    const unsigned hop = rightward ? sw : sw - 1;
    Hop& h = hops_.at(hop);
    SimTime start = max(t, h.free_at[side]);
    h.free_at[side] = start + xfer;
    h.entered[side] += bytes;
    h.left[side] += bytes;
    t = start + topo_.hop_latency;
    sw = rightward ? sw + 1 : sw - 1;
  }
  return (t + xfer) - now;
}

std::uint64_t Crossbar::bytes_entered(unsigned hop, bool rightward) const { return hops_.at(hop).entered[rightward ? 0 : 1]; }
std::uint64_t Crossbar::bytes_left(unsigned hop, bool rightward) const { return hops_.at(hop).left[rightward ? 0 : 1]; }

std::uint64_t Crossbar::lateral_bytes() const {
  std::uint64_t total = 0;
  for (const Hop& h : hops_) total += h.entered[0] + h.entered[1];
  return total;
}

AxiMaster::AxiMaster(HbmSystem& system, unsigned id, const AxiMasterProfile& profile, const ClockDomain& kernel)
    : sys_(system), id_(id), profile_(profile), kernel_(kernel) {
  profile_.validate();
  binding_.master = id;
}

void AxiMaster::bind(BundleBinding binding) {
  binding.master = id_;
  validate_binding(sys_.profile(), binding);
  binding_ = std::move(binding);
}

IssueDecision AxiMaster::try_issue(const MemRequest& req, SimTime now) const {
  if (!binding_.targets(req.pc)) {
    std::ostringstream msg;
    msg << "master " << id_ << " has no binding to PC " << req.pc;
    throw ConfigError(msg.str());
  }
  const Lane& l = lane(req.kind);
  if (l.in_flight.size() < window(req.kind)) return IssueDecision{true, now};
  SimTime earliest{~std::uint64_t{0}};
  for (const auto& [id, t] : l.in_flight) earliest = min(earliest, t);
  return IssueDecision{false, earliest};
}

void AxiMaster::submit(MemRequest req, std::vector<Line> payload, CompletionCallback done) {
  req.master = id_;
  req.validate(sys_.profile().pc_capacity);
  if (req.burst_len > profile_.max_burst_len) {
    std::ostringstream msg;
    msg << "master " << id_ << ": burst_len " << req.burst_len << " exceeds max_burst_len " << profile_.max_burst_len;
    throw ConfigError(msg.str());
  }
  if (!binding_.targets(req.pc)) {
    std::ostringstream msg;
    msg << "master " << id_ << " has no binding to PC " << req.pc;
    throw ConfigError(msg.str());
  }
  if (req.kind == AccessKind::write && payload.size() != req.burst_len)
    throw SimulationError("write payload size does not match burst length");
  sys_.note_submitted(req);
  Lane& l = lane(req.kind);
  l.queue.push_back(Pending{std::move(req), std::move(payload), std::move(done)});
  schedule_pump(l.queue.back().req.kind, sys_.engine().now());
}

unsigned AxiMaster::in_flight(AccessKind kind) const { return static_cast<unsigned>(lane(kind).in_flight.size()); }
std::size_t AxiMaster::queued(AccessKind kind) const { return lane(kind).queue.size(); }
std::uint64_t AxiMaster::max_in_flight_seen(AccessKind kind) const { return lane(kind).peak; }

void AxiMaster::schedule_pump(AccessKind kind, SimTime at) {
  Lane& l = lane(kind);
  if (l.pump_scheduled) return;
  l.pump_scheduled = true;
  sys_.engine().schedule(at, [this, kind] {
    lane(kind).pump_scheduled = false;
    pump(kind);
  });
}

void AxiMaster::pump(AccessKind kind) {
  Lane& l = lane(kind);
  const SimTime now = sys_.engine().now();
  while (!l.queue.empty() && l.in_flight.size() < window(kind)) {
    const SimTime slot = max(kernel_.next_edge(now), l.addr_free);
    if (slot > now) {
      schedule_pump(kind, slot);
      return;
    }
    Pending p = std::move(l.queue.front());
    l.queue.pop_front();
    l.addr_free = now + kernel_.period();
    issue(std::move(p), now);
  }
}

void AxiMaster::issue(Pending p, SimTime at) {
  Lane& l = lane(p.req.kind);
  p.req.issue_time = at;
  const unsigned hops = sys_.crossbar().hops(id_, p.req.pc);
  const SimTime hop_lat = sys_.crossbar().topology().hop_latency * hops;
  l.in_flight[p.req.id] = at + hop_lat;
  l.peak = std::max<std::uint64_t>(l.peak, l.in_flight.size());
  if (l.in_flight.size() > window(p.req.kind)) throw SimulationError("outstanding window overflow");

  auto shared = std::make_shared<Pending>(std::move(p));
  if (shared->req.kind == AccessKind::read) {
    sys_.engine().schedule(at + hop_lat, [this, shared] { arrive_read(std::move(*shared)); });
    return;
  }
  const SimTime push_start = max(at, l.data_free);
  const SimTime push_end = push_start + kernel_.cycles(shared->req.burst_len);
  l.data_free = push_end;
  const SimTime link = sys_.crossbar().route(id_, shared->req.pc, shared->req.bytes(), push_start);
  const SimTime link_end = push_start + link;
  sys_.engine().schedule(push_start + hop_lat,
                         [this, shared, push_end, link_end] { arrive_write(std::move(*shared), push_end, link_end); });
}

void AxiMaster::arrive_read(Pending p) {
  const SimTime now = sys_.engine().now();
  const MemRequest& req = p.req;
  const ServiceTiming svc = pc_service(sys_.timing(), req, sys_.pc_state(req.pc), now);

  std::vector<Line> data;
  data.reserve(req.burst_len);
  SparseMemory& mem = sys_.memory(req.pc);
  const std::uint64_t beat_bytes = req.beat_width / 8;
  for (unsigned i = 0; i < req.burst_len; ++i) data.push_back(mem.read(req.address + i * beat_bytes));

  const unsigned hops = sys_.crossbar().hops(id_, req.pc);
  const SimTime hop_lat = sys_.crossbar().topology().hop_latency * hops;
  const SimTime first_out = svc.data_start + sys_.timing().lat_hbm;
  SimTime last_in = svc.completion + hop_lat;
  if (hops > 0) {
    const SimTime link = sys_.crossbar().route(id_, req.pc, req.bytes(), first_out, LinkDirection::pc_to_master);
    last_in = max(last_in, first_out + link);
  }
  Lane& l = lane(AccessKind::read);
  const SimTime first_in = first_out + hop_lat;
  const SimTime recv_end = max(last_in, max(first_in, l.data_free) + kernel_.cycles(req.burst_len));
  l.data_free = recv_end;
  const SimTime done = kernel_.next_edge(recv_end);
  l.in_flight[req.id] = done;
  auto shared = std::make_shared<Pending>(std::move(p));
  auto payload = std::make_shared<std::vector<Line>>(std::move(data));
  sys_.engine().schedule(done, [this, shared, payload, done] { retire(std::move(*shared), std::move(*payload), done); });
}

void AxiMaster::arrive_write(Pending p, SimTime push_end, SimTime link_end) {
  const SimTime now = sys_.engine().now();
  const MemRequest& req = p.req;
  const ServiceTiming svc = pc_service(sys_.timing(), req, sys_.pc_state(req.pc), now, max(push_end, link_end));
  SparseMemory& mem = sys_.memory(req.pc);
  const std::uint64_t beat_bytes = req.beat_width / 8;
  for (unsigned i = 0; i < req.burst_len; ++i) mem.write(req.address + i * beat_bytes, p.payload[i]);

  const SimTime hop_lat = sys_.crossbar().topology().hop_latency * sys_.crossbar().hops(id_, req.pc);
  const SimTime done = kernel_.next_edge(svc.completion + hop_lat);
  lane(AccessKind::write).in_flight[req.id] = done;
  auto shared = std::make_shared<Pending>(std::move(p));
  sys_.engine().schedule(done, [this, shared, done] { retire(std::move(*shared), {}, done); });
}

void AxiMaster::retire(Pending p, std::vector<Line>&& data, SimTime done) {
  Lane& l = lane(p.req.kind);
  l.in_flight.erase(p.req.id);
  const AccessKind kind = p.req.kind;
  if (p.done) p.done(p.req, std::move(data), done);
  pump(kind);
}

std::vector<unsigned> infer_burst(const AxiMasterProfile& master, const AccessStream& stream) {
  std::vector<unsigned> out;
  if (stream.total_beats == 0) return out;
  if (master.burst_inference == BurstInference::always_one || stream.data_dependent_target || master.max_burst_len == 1) {
    out.assign(stream.total_beats, 1U);
    return out;
  }
  const std::uint64_t run = stream.run_beats == 0 ? stream.total_beats : stream.run_beats;
  std::uint64_t left = stream.total_beats;
  while (left > 0) {
    std::uint64_t in_run = std::min(run, left);
    left -= in_run;
    while (in_run > 0) {
      const auto b = static_cast<unsigned>(std::min<std::uint64_t>(in_run, master.max_burst_len));
      out.push_back(b);
      in_run -= b;
    }
  }
  return out;
}

}  // namespace hbmsim
