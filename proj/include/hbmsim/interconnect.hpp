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
 * @file interconnect.hpp
 * @brief Kernel-side AXI masters and the segmented switch network.
 *
 * Masters and PCs attach to the crossbar by index: port i sits on unit
 * switch i / ports_per_switch. Traffic between ports on the same switch is
 * free. Traffic between switches reserves every lateral hop on the way, in
 * the direction the data moves (writes master->PC, read data PC->master).
 */
#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <map>
#include <string>
#include <vector>

#include "hbmsim/memory_model.hpp"
#include "hbmsim/profile.hpp"
#include "hbmsim/sim_core.hpp"

namespace hbmsim {

class HbmSystem;

/// Which master profile a bundle is generated with.
enum class MasterFlavor { hls, rtl };

/// One AXI master (HLS bundle) and the PEs and PCs attached to it.
struct BundleBinding {
  unsigned master = 0;
  std::vector<unsigned> read_pes;
  std::vector<unsigned> write_pes;
  std::vector<unsigned> target_pcs;

  bool targets(unsigned pc) const;
};

/// Throws ConfigError when a binding breaks a connectivity rule of `profile`.
void validate_binding(const PlatformProfile& profile, const BundleBinding& binding);

enum class LinkDirection { master_to_pc, pc_to_master };

/// Lateral-hop occupancy model of the segmented crossbar.
class Crossbar {
 public:
  explicit Crossbar(const CrossbarTopology& topo);

  const CrossbarTopology& topology() const { return topo_; }
  bool local(unsigned master, unsigned pc) const { return topo_.switch_of(master) == topo_.switch_of(pc); }
  unsigned hops(unsigned master, unsigned pc) const;

  /**
   * Reserve the path for `bytes` starting at `now`; returns the delay until
   * the last byte has crossed. A local path returns zero. Each hop adds
   * hop_latency; the transfer time bytes / lateral_bw is paid once, plus any
   * wait for a busy hop.
   */
  SimTime route(unsigned master, unsigned pc, std::uint64_t bytes, SimTime now,
                LinkDirection dir = LinkDirection::master_to_pc);

  /// Bytes that entered / left the hop between switch h and h+1, per direction.
  std::uint64_t bytes_entered(unsigned hop, bool rightward) const;
  std::uint64_t bytes_left(unsigned hop, bool rightward) const;
  std::uint64_t lateral_bytes() const;

 private:
  struct Hop {
    SimTime free_at[2]{};
    std::uint64_t entered[2]{};
    std::uint64_t left[2]{};
  };
  CrossbarTopology topo_;
  std::vector<Hop> hops_;
};

/// Result of asking a master to accept a request.
struct IssueDecision {
  bool accepted = false;
  SimTime stalled_until{};
};

/// Data delivered with a completion: one Line per beat for reads.
using CompletionCallback = std::function<void(const MemRequest&, std::vector<Line>&& data, SimTime done)>;

/**
 * Kernel-side AXI master. Requests queue per kind and issue in order, one
 * address per kernel cycle, while the outstanding window has room. Read
 * data and write data cross the kernel-side channel at one beat per kernel
 * cycle.
 */
class AxiMaster {
 public:
  AxiMaster(HbmSystem& system, unsigned id, const AxiMasterProfile& profile, const ClockDomain& kernel);

  unsigned id() const { return id_; }
  const AxiMasterProfile& profile() const { return profile_; }
  const ClockDomain& kernel_clock() const { return kernel_; }
  const BundleBinding& binding() const { return binding_; }
  void bind(BundleBinding binding);

  /// Window check. Throws ConfigError if the PC is not bound to this master.
  IssueDecision try_issue(const MemRequest& req, SimTime now) const;

  /// Queue a request; `payload` carries one Line per beat for writes.
  void submit(MemRequest req, std::vector<Line> payload, CompletionCallback done);

  unsigned in_flight(AccessKind kind) const;
  std::size_t queued(AccessKind kind) const;
  std::uint64_t max_in_flight_seen(AccessKind kind) const;

 private:
  struct Pending {
    MemRequest req;
    std::vector<Line> payload;
    CompletionCallback done;
  };
  struct Lane {
    std::deque<Pending> queue;
    // request id -> completion time once serviced, arrival time before that
    std::map<std::uint64_t, SimTime> in_flight;
    SimTime addr_free{};
    SimTime data_free{};
    bool pump_scheduled = false;
    std::uint64_t peak = 0;
  };

  Lane& lane(AccessKind k) { return k == AccessKind::read ? read_ : write_; }
  const Lane& lane(AccessKind k) const { return k == AccessKind::read ? read_ : write_; }
  unsigned window(AccessKind k) const {
    return k == AccessKind::read ? profile_.max_outstanding_reads : profile_.max_outstanding_writes;
  }
  void schedule_pump(AccessKind kind, SimTime at);
  void pump(AccessKind kind);
  void issue(Pending p, SimTime at);
  void arrive_read(Pending p);
  void arrive_write(Pending p, SimTime push_end, SimTime link_end);
  void retire(Pending p, std::vector<Line>&& data, SimTime done);

  HbmSystem& sys_;
  unsigned id_;
  AxiMasterProfile profile_;
  ClockDomain kernel_;
  BundleBinding binding_;
  Lane read_;
  Lane write_;
};

/// A run of beats as an HLS tool sees it when inferring bursts.
struct AccessStream {
  std::uint64_t total_beats = 0;
  /// Contiguous same-PC beats between PC switches or address jumps.
  std::uint64_t run_beats = 0;
  /// Destination PC chosen per element from data (bucket ids, etc.).
  bool data_dependent_target = false;
};

/// Burst lengths the master would emit for `stream`.
std::vector<unsigned> infer_burst(const AxiMasterProfile& master, const AccessStream& stream);

}  // namespace hbmsim
