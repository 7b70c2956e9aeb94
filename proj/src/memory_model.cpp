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

#include "hbmsim/memory_model.hpp"

#include <sstream>

namespace hbmsim {

void MemRequest::validate(std::uint64_t pc_capacity) const {
  if (burst_len < 1 || burst_len > kMaxBurstLen) {
    std::ostringstream msg;
    msg << "request " << id << ": burst_len " << burst_len << " outside [1, 256]";
    throw ConfigError(msg.str());
  }
  if (beat_width == 0 || beat_width % 8) throw ConfigError("request beat_width must be a positive multiple of 8");
  if (address + bytes() > pc_capacity) {
    std::ostringstream msg;
    msg << "request " << id << ": burst [" << address << ", " << address + bytes() << ") crosses the PC boundary";
    throw ConfigError(msg.str());
  }
}

DecodedAddress decode(const PlatformProfile& p, std::uint64_t global_address) {
  if (global_address >= p.total_capacity()) {
    std::ostringstream msg;
    msg << "address " << global_address << " beyond " << p.total_capacity() << " bytes of HBM";
    throw ConfigError(msg.str());
  }
  DecodedAddress d;
  d.pc = static_cast<unsigned>(global_address / p.pc_capacity);
  std::uint64_t offset = global_address % p.pc_capacity;
  d.page = offset / p.page_size;
  d.bank = static_cast<unsigned>(d.page % p.banks_per_pc);
  d.column = offset % p.page_size;
  return d;
}

PcTiming PcTiming::from(const PlatformProfile& p) {
  PcTiming t;
  t.bytes_per_second = p.effective_pc_bw();
  t.page_size = p.page_size;
  t.banks = p.banks_per_pc;
  t.t_rc = p.t_rc;
  t.t_page_miss = p.t_page_miss;
  t.lat_hbm = p.lat_hbm;
  return t;
}

ServiceTiming pc_service(const PcTiming& timing, const MemRequest& req, PCState& state, SimTime now,
                         SimTime data_not_before_end) {
  ServiceTiming out;
  const std::uint64_t bytes = req.bytes();
  SimTime row_ready = now;
  const std::uint64_t first_page = req.address / timing.page_size;
  const std::uint64_t last_page = (req.address + bytes - 1) / timing.page_size;
  for (std::uint64_t page = first_page; page <= last_page; ++page) {
    const auto bank = static_cast<unsigned>(page % timing.banks);
    if (state.open_page[bank] == page) {
      ++state.page_hits;
      continue;
    }
    SimTime act = max(max(now, state.next_activation_at), state.bank_busy_until[bank]);
    state.next_activation_at = act + timing.t_rc;
    state.open_page[bank] = page;
    row_ready = max(row_ready, act + timing.t_page_miss);
    ++state.page_misses;
    ++out.activations;
  }

  out.data_start = max(max(now, state.data_bus_free_at), row_ready);
  out.data_end = max(out.data_start + timing.transfer_time(bytes), data_not_before_end);
  out.completion = out.data_end + timing.lat_hbm;

  state.data_bus_free_at = out.data_end;
  for (std::uint64_t page = first_page; page <= last_page; ++page) {
    const auto bank = static_cast<unsigned>(page % timing.banks);
    state.bank_busy_until[bank] = max(state.bank_busy_until[bank], out.data_end);
  }
  state.bytes_served += bytes;
  (req.kind == AccessKind::read ? state.bytes_read : state.bytes_written) += bytes;
  return out;
}

Line SparseMemory::read(std::uint64_t address) const {
  const std::uint64_t line = address / line_bytes_;
  auto it = chunks_.find(line / kChunkLines);
  if (it != chunks_.end()) {
    const unsigned slot = line % kChunkLines;
    if (it->second->valid >> slot & 1U) return it->second->lines[slot];
  }
  return init_ ? init_(line) : Line{};
}

void SparseMemory::write(std::uint64_t address, const Line& value) {
  const std::uint64_t line = address / line_bytes_;
  auto& chunk = chunks_[line / kChunkLines];
  if (!chunk) chunk = std::make_unique<Chunk>();
  const unsigned slot = line % kChunkLines;
  if (!(chunk->valid >> slot & 1U)) ++written_;
  chunk->valid |= std::uint64_t{1} << slot;
  chunk->lines[slot] = value;
}

}  // namespace hbmsim
