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

#include "hbmsim/arbitrators.hpp"

#include <algorithm>
#include <sstream>

namespace hbmsim {

void BicaConfig::validate() const {
  if (pc_targets.empty()) throw ConfigError("BICA needs at least one target PC");
  std::set<unsigned> uniq(pc_targets.begin(), pc_targets.end());
  if (uniq.size() != pc_targets.size()) throw ConfigError("BICA target PCs must be distinct");
  if (burst_len < 1 || burst_len > kMaxBurstLen) throw ConfigError("BICA burst_len must be in [1, 256]");
  if (fifo_depth < burst_len) throw ConfigError("BICA fifo_depth must be >= burst_len");
  if (data_width == 0 || data_width % 8) throw ConfigError("BICA data_width must be a positive multiple of 8");
  if (max_inflight_bursts < 1) throw ConfigError("BICA needs at least one burst in flight");
}

Bica::Bica(BicaConfig config, std::vector<std::uint64_t> region_base) : cfg_(std::move(config)) {
  cfg_.validate();
  if (region_base.size() != cfg_.pc_targets.size()) throw ConfigError("BICA needs one region base per target PC");
  fifos_.resize(cfg_.pc_targets.size());
  cursor_ = std::move(region_base);
  in_.assign(fifos_.size(), 0);
  out_.assign(fifos_.size(), 0);
}

unsigned Bica::fifo_of(unsigned pc) const {
  auto it = std::find(cfg_.pc_targets.begin(), cfg_.pc_targets.end(), pc);
  if (it == cfg_.pc_targets.end()) {
    std::ostringstream msg;
    msg << "BICA has no batch FIFO for PC " << pc;
    throw ConfigError(msg.str());
  }
  return static_cast<unsigned>(it - cfg_.pc_targets.begin());
}

std::optional<unsigned> Bica::split(const BicaRecord& record) {
  const unsigned f = fifo_of(record.target_pc);
  if (full(f)) return std::nullopt;
  fifos_[f].push_back(record.payload);
  ++in_[f];
  return f;
}

bool Bica::empty() const {
  return std::all_of(fifos_.begin(), fifos_.end(), [](const auto& q) { return q.empty(); });
}

std::optional<unsigned> Bica::next_ready() const {
  const auto n = static_cast<unsigned>(fifos_.size());
  for (unsigned i = 0; i < n; ++i) {
    unsigned f = (rr_next_ + i) % n;
    if (ready(f)) return f;
  }
  return std::nullopt;
}

std::optional<unsigned> Bica::next_nonempty() const {
  const auto n = static_cast<unsigned>(fifos_.size());
  for (unsigned i = 0; i < n; ++i) {
    unsigned f = (rr_next_ + i) % n;
    if (!fifos_[f].empty()) return f;
  }
  return std::nullopt;
}

BicaBurst Bica::drain(unsigned fifo, bool flush) {
  auto& q = fifos_.at(fifo);
  const std::size_t take = flush ? std::min<std::size_t>(q.size(), cfg_.burst_len) : cfg_.burst_len;
  if (take == 0 || q.size() < take) throw SimulationError("BICA drain would underflow its batch FIFO");
  BicaBurst b;
  b.fifo = fifo;
  b.pc = cfg_.pc_targets[fifo];
  b.address = cursor_[fifo];
  b.burst_len = static_cast<unsigned>(take);
  b.flush = take < cfg_.burst_len;
  b.payload.assign(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(take));
  q.erase(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(take));
  cursor_[fifo] += take * (cfg_.data_width / 8);
  out_[fifo] += take;
  rr_next_ = (fifo + 1) % static_cast<unsigned>(fifos_.size());
  return b;
}

void BipaConfig::validate() const {
  if (pe_count < 1) throw ConfigError("BIPA needs at least one PE");
  if (data_width == 0 || data_width % 8) throw ConfigError("BIPA data_width must be a positive multiple of 8");
  if (arbitration_cost < 1) throw ConfigError("BIPA arbitration_cost must be >= 1 cycle");
}

ArbitrationResult round_robin_pick(RoundRobinState& state, std::span<const std::size_t> pending_counts) {
  ArbitrationResult r;
  const auto n = static_cast<unsigned>(pending_counts.size());
  if (n == 0) return r;
  state.next_index %= n;
  for (unsigned i = 0; i < n; ++i) {
    const unsigned pe = (state.next_index + i) % n;
    ++r.scanned;
    if (pending_counts[pe] > 0) {
      r.granted = pe;
      state.next_index = (pe + 1) % n;
      return r;
    }
  }
  return r;
}

Bipa::Bipa(BipaConfig config) : cfg_(config) {
  cfg_.validate();
  requests_.resize(cfg_.pe_count);
  grants_.assign(cfg_.pe_count, 0);
}

void Bipa::push_request(unsigned pe, std::uint64_t address) { requests_.at(pe).push_back(address); }

bool Bipa::any_pending() const {
  return std::any_of(requests_.begin(), requests_.end(), [](const auto& q) { return !q.empty(); });
}

std::optional<BipaGrant> Bipa::arbitrate(unsigned* scanned_out) {
  std::vector<std::size_t> counts(requests_.size());
  for (std::size_t i = 0; i < requests_.size(); ++i) counts[i] = requests_[i].size();
  ArbitrationResult r = round_robin_pick(rr_, counts);
  if (scanned_out) *scanned_out = r.scanned;
  if (!r.granted) return std::nullopt;
  BipaGrant g;
  g.pe = *r.granted;
  g.scanned = r.scanned;
  g.address = requests_[g.pe].front();
  requests_[g.pe].pop_front();
  ++grants_[g.pe];
  if (!cfg_.write_only) {
    g.tag = next_tag_++;
    tags_.emplace(g.tag, g.pe);
  }
  return g;
}

unsigned Bipa::route_response(std::uint64_t tag) {
  auto it = tags_.find(tag);
  if (it == tags_.end()) {
    std::ostringstream msg;
    msg << "BIPA response with unknown tag " << tag;
    throw SimulationError(msg.str());
  }
  const unsigned pe = it->second;
  tags_.erase(it);
  ++retired_;
  return pe;
}

}  // namespace hbmsim
