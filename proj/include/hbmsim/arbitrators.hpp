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

/**
 * @file arbitrators.hpp
 * @brief Batched inter-channel (BICA) and inter-PE (BIPA) arbitrators.
 *
 * BICA sits between a PE that scatters records to several PCs and the write
 * master. A splitter appends each record to the batch FIFO of its target PC;
 * a drain loop writes BLEN records from one FIFO as a single burst, so the
 * master sees long bursts even though consecutive records go to different
 * PCs.
 *
 * BIPA lets several PEs share one bundle. Each PE pushes addresses into its
 * own request FIFO; a round-robin arbiter forwards them one at a time, tagged
 * with the PE id, and responses are routed back by tag.
 *
 * Both classes hold only the logical state. The timing drivers that call
 * them once per kernel cycle live with the workloads.
 */
#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "hbmsim/memory_model.hpp"

namespace hbmsim {

struct BicaConfig {
  std::vector<unsigned> pc_targets;
  unsigned fifo_depth = 64;
  unsigned burst_len = 64;
  unsigned data_width = 512;
  /// Bursts the drain loop keeps in flight. The HLS drain loop waits for the
  /// write response of a burst before starting the next one.
  unsigned max_inflight_bursts = 1;

  void validate() const;
};

/// A record bound for one PC.
struct BicaRecord {
  Line payload;
  unsigned target_pc = 0;
};

/// A write burst produced by a drain.
struct BicaBurst {
  unsigned fifo = 0;
  unsigned pc = 0;
  std::uint64_t address = 0;
  unsigned burst_len = 0;
  bool flush = false;
  std::vector<Line> payload;
};

class Bica {
 public:
  /// `region_base[i]` is where records for pc_targets[i] start inside that PC.
  Bica(BicaConfig config, std::vector<std::uint64_t> region_base);

  const BicaConfig& config() const { return cfg_; }
  std::size_t fifo_count() const { return fifos_.size(); }

  /// FIFO index for `pc`. Throws ConfigError for a PC that is not a target.
  unsigned fifo_of(unsigned pc) const;

  /**
   * Append `record` to its batch FIFO. Returns the FIFO index, or nullopt if
   * that FIFO is full and the splitter has to stall.
   */
  std::optional<unsigned> split(const BicaRecord& record);

  std::size_t occupancy(unsigned fifo) const { return fifos_.at(fifo).size(); }
  bool full(unsigned fifo) const { return fifos_.at(fifo).size() >= cfg_.fifo_depth; }
  bool ready(unsigned fifo) const { return fifos_.at(fifo).size() >= cfg_.burst_len; }
  bool empty() const;

  /// Next FIFO holding at least BLEN records, round-robin after the last drain.
  std::optional<unsigned> next_ready() const;
  /// Next non-empty FIFO for the end-of-stream flush.
  std::optional<unsigned> next_nonempty() const;

  /**
   * Remove one batch from `fifo`: BLEN records, or everything left when
   * `flush` is set. The burst lands at the PC's write cursor, which then
   * advances by burst_len * data_width / 8.
   */
  BicaBurst drain(unsigned fifo, bool flush = false);

  std::uint64_t records_in(unsigned fifo) const { return in_.at(fifo); }
  std::uint64_t records_out(unsigned fifo) const { return out_.at(fifo); }
  std::uint64_t cursor(unsigned fifo) const { return cursor_.at(fifo); }

 private:
  BicaConfig cfg_;
  std::vector<std::deque<Line>> fifos_;
  std::vector<std::uint64_t> cursor_;
  std::vector<std::uint64_t> in_;
  std::vector<std::uint64_t> out_;
  unsigned rr_next_ = 0;
};

struct BipaConfig {
  unsigned pe_count = 2;
  unsigned data_width = 512;
  /// Kernel cycles spent per PE position the arbiter polls.
  unsigned arbitration_cost = 1;
  /// Kernel cycles per PE position the response demux passes through.
  unsigned response_routing_cost = 1;
  /// Write-only arbitration has no response path.
  bool write_only = false;

  void validate() const;
};

struct RoundRobinState {
  unsigned next_index = 0;
};

struct ArbitrationResult {
  std::optional<unsigned> granted;
  /// Positions examined, including the granted one.
  unsigned scanned = 0;
};

/**
 * One non-blocking round-robin pass over `pending_counts` starting at
 * state.next_index. Grants the first PE with a pending request and moves
 * next_index past it.
 */
ArbitrationResult round_robin_pick(RoundRobinState& state, std::span<const std::size_t> pending_counts);

/// A request forwarded to the PC, tagged for response routing.
struct BipaGrant {
  unsigned pe = 0;
  std::uint64_t tag = 0;
  std::uint64_t address = 0;
  unsigned scanned = 0;
};

class Bipa {
 public:
  explicit Bipa(BipaConfig config);

  const BipaConfig& config() const { return cfg_; }
  const RoundRobinState& state() const { return rr_; }

  void push_request(unsigned pe, std::uint64_t address);
  std::size_t pending(unsigned pe) const { return requests_.at(pe).size(); }
  bool any_pending() const;

  /// One arbitration round. nullopt when every request FIFO is empty.
  std::optional<BipaGrant> arbitrate(unsigned* scanned_out = nullptr);

  /// Retire `tag` and return the PE that issued it. Unknown tags are a bug.
  unsigned route_response(std::uint64_t tag);

  std::size_t tags_in_flight() const { return tags_.size(); }
  std::uint64_t tags_issued() const { return next_tag_; }
  std::uint64_t tags_retired() const { return retired_; }
  std::uint64_t grants(unsigned pe) const { return grants_.at(pe); }

  /// Cycles a response spends in the demux before reaching its PE.
  unsigned response_latency_cycles() const { return cfg_.response_routing_cost * cfg_.pe_count; }

 private:
  BipaConfig cfg_;
  std::vector<std::deque<std::uint64_t>> requests_;
  RoundRobinState rr_;
  std::map<std::uint64_t, unsigned> tags_;
  std::vector<std::uint64_t> grants_;
  std::uint64_t next_tag_ = 0;
  std::uint64_t retired_ = 0;
};

}  // namespace hbmsim
