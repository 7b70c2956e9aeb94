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

#include "hbmsim/system.hpp"

#include <sstream>

namespace hbmsim {

HbmSystem::HbmSystem(PlatformProfile profile)
    : profile_((profile.validate(), std::move(profile))),
      timing_(PcTiming::from(profile_)),
      crossbar_(profile_.crossbar),
      pcs_(profile_.pc_count, PCState(profile_.banks_per_pc)) {
  stores_.reserve(profile_.pc_count);
  for (unsigned i = 0; i < profile_.pc_count; ++i) stores_.emplace_back(profile_.master_data_width / 8);
}

PCState& HbmSystem::pc_state(unsigned pc) {
  if (pc >= pcs_.size()) throw ConfigError("PC index out of range");
  return pcs_[pc];
}

const PCState& HbmSystem::pc_state(unsigned pc) const {
  if (pc >= pcs_.size()) throw ConfigError("PC index out of range");
  return pcs_[pc];
}

SparseMemory& HbmSystem::memory(unsigned pc) {
  if (pc >= stores_.size()) throw ConfigError("PC index out of range");
  return stores_[pc];
}

AxiMaster& HbmSystem::add_master(BundleBinding binding, MasterFlavor flavor, const ClockDomain& kernel) {
  return add_master(std::move(binding), flavor == MasterFlavor::hls ? profile_.hls_master : profile_.rtl_master, kernel);
}

AxiMaster& HbmSystem::add_master(BundleBinding binding, const AxiMasterProfile& profile, const ClockDomain& kernel) {
  const unsigned id = binding.master;
  if (masters_.count(id)) {
    std::ostringstream msg;
    msg << "master " << id << " is already bound";
    throw ConfigError(msg.str());
  }
  auto m = std::make_unique<AxiMaster>(*this, id, profile, kernel);
  m->bind(std::move(binding));
  auto& ref = *m;
  masters_.emplace(id, std::move(m));
  return ref;
}

AxiMaster& HbmSystem::master(unsigned id) {
  auto it = masters_.find(id);
  if (it == masters_.end()) throw ConfigError("no such master");
  return *it->second;
}

void HbmSystem::note_submitted(const MemRequest& req) { submitted_[req.kind == AccessKind::read ? 0 : 1] += req.bytes(); }

std::uint64_t HbmSystem::bytes_submitted(AccessKind kind) const { return submitted_[kind == AccessKind::read ? 0 : 1]; }

std::uint64_t HbmSystem::bytes_served_total() const {
  std::uint64_t total = 0;
  for (const auto& pc : pcs_) total += pc.bytes_served;
  return total;
}

std::vector<std::uint64_t> HbmSystem::per_pc_bytes() const {
  std::vector<std::uint64_t> out;
  out.reserve(pcs_.size());
  for (const auto& pc : pcs_) out.push_back(pc.bytes_served);
  return out;
}

}  // namespace hbmsim
