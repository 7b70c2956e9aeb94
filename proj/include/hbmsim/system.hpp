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
 * @file system.hpp
 * @brief One simulation instance: engine, pseudo channels, crossbar, masters.
 */
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "hbmsim/interconnect.hpp"
#include "hbmsim/memory_model.hpp"
#include "hbmsim/profile.hpp"
#include "hbmsim/sim_core.hpp"

namespace hbmsim {

class HbmSystem {
 public:
  explicit HbmSystem(PlatformProfile profile);
  HbmSystem(const HbmSystem&) = delete;
  HbmSystem& operator=(const HbmSystem&) = delete;

  Engine& engine() { return engine_; }
  const PlatformProfile& profile() const { return profile_; }
  const PcTiming& timing() const { return timing_; }
  Crossbar& crossbar() { return crossbar_; }

  PCState& pc_state(unsigned pc);
  const PCState& pc_state(unsigned pc) const;
  SparseMemory& memory(unsigned pc);

  /// Creates master `id` (a crossbar port index). Validates the binding.
  AxiMaster& add_master(BundleBinding binding, MasterFlavor flavor, const ClockDomain& kernel);
  AxiMaster& add_master(BundleBinding binding, const AxiMasterProfile& profile, const ClockDomain& kernel);
  AxiMaster& master(unsigned id);
  bool has_master(unsigned id) const { return masters_.count(id) != 0; }

  std::uint64_t next_request_id() { return next_id_++; }

  /// Accounting for byte conservation: bytes handed to masters by PEs.
  void note_submitted(const MemRequest& req);
  std::uint64_t bytes_submitted(AccessKind kind) const;
  std::uint64_t bytes_served_total() const;
  std::vector<std::uint64_t> per_pc_bytes() const;

 private:
  PlatformProfile profile_;
  PcTiming timing_;
  Engine engine_;
  Crossbar crossbar_;
  std::vector<PCState> pcs_;
  std::vector<SparseMemory> stores_;
  std::map<unsigned, std::unique_ptr<AxiMaster>> masters_;
  std::uint64_t next_id_ = 0;
  std::uint64_t submitted_[2]{};
};

}  // namespace hbmsim
