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
 * @file memory_model.hpp
 * @brief Pseudo-channel service timing, address decoding and backing store.
 *
 * Timing of one access to a pseudo channel (PC):
 *
 *   - Every bank keeps one open page. Touching a different page in a bank is
 *     a page miss: a row activation is needed before data can move.
 *   - Activations within a PC are spaced at least t_rc apart. A miss adds
 *     t_page_miss of latency before the data bus can serve the access.
 *   - The data bus is in-order and is occupied for bytes / effective rate.
 *   - lat_hbm is pipeline latency after the transfer; it overlaps between
 *     requests and does not occupy the bus.
 *
 *   completion = data_start + transfer + lat_hbm
 *   data_start = max(now, bus_free, row_ready)
 */
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "hbmsim/profile.hpp"
#include "hbmsim/sim_core.hpp"

namespace hbmsim {

enum class AccessKind { read, write };

inline const char* to_string(AccessKind k) { return k == AccessKind::read ? "read" : "write"; }

/// A tagged burst of `burst_len` beats of `beat_width` bits to one PC.
struct MemRequest {
  std::uint64_t id = 0;
  AccessKind kind = AccessKind::read;
  unsigned pc = 0;
  std::uint64_t address = 0;  // byte offset inside the PC
  unsigned burst_len = 1;
  unsigned beat_width = 512;  // bits
  SimTime issue_time{};
  unsigned master = 0;
  unsigned pe = 0;
  std::uint64_t tag = 0;

  std::uint64_t bytes() const { return std::uint64_t{burst_len} * beat_width / 8; }
  /// Throws ConfigError when the burst is malformed or leaves the PC.
  void validate(std::uint64_t pc_capacity) const;
};

struct DecodedAddress {
  unsigned pc = 0;
  unsigned bank = 0;
  std::uint64_t page = 0;
  std::uint64_t column = 0;

  bool operator==(const DecodedAddress&) const = default;
};

/// Global address -> (pc, bank, page, column). Pages are bank-interleaved.
DecodedAddress decode(const PlatformProfile& p, std::uint64_t global_address);

/// Open-page state and busy times of one pseudo channel.
struct PCState {
  std::vector<std::optional<std::uint64_t>> open_page;
  std::vector<SimTime> bank_busy_until;
  SimTime data_bus_free_at{};
  SimTime next_activation_at{};
  std::uint64_t bytes_served = 0;
  std::uint64_t bytes_read = 0;
  std::uint64_t bytes_written = 0;
  std::uint64_t page_hits = 0;
  std::uint64_t page_misses = 0;

  explicit PCState(unsigned banks = 16) : open_page(banks), bank_busy_until(banks) {}
};

/// Result of servicing one request at a PC.
struct ServiceTiming {
  SimTime data_start;
  SimTime data_end;
  SimTime completion;  // data_end + lat_hbm
  unsigned activations = 0;
};

/// Timing parameters of a PC derived from a profile.
struct PcTiming {
  double bytes_per_second = 0.0;
  std::uint64_t page_size = 4096;
  unsigned banks = 16;
  SimTime t_rc{};
  SimTime t_page_miss{};
  SimTime lat_hbm{};

  static PcTiming from(const PlatformProfile& p);
  SimTime transfer_time(std::uint64_t bytes) const { return SimTime::transfer(static_cast<double>(bytes), bytes_per_second); }
};

/**
 * Service `req` at `now`, updating `state`. `data_not_before_end` lets a
 * write whose data is still streaming in from the kernel hold the transfer
 * end back.
 */
ServiceTiming pc_service(const PcTiming& timing, const MemRequest& req, PCState& state, SimTime now,
                         SimTime data_not_before_end = SimTime{});

/// One 512-bit line of payload as seen by the behavioral PEs.
struct Line {
  std::uint64_t word = 0;
  std::uint64_t aux = 0;

  bool operator==(const Line&) const = default;
};

/**
 * Sparse functional contents of one PC at line granularity. Lines that were
 * never written are produced by an optional initializer, so large read-only
 * data (search arrays, trees) costs no host memory until overwritten.
 */
class SparseMemory {
 public:
  using Initializer = std::function<Line(std::uint64_t line_index)>;

  explicit SparseMemory(unsigned line_bytes = 64) : line_bytes_(line_bytes) {}

  void set_initializer(Initializer init) { init_ = std::move(init); }
  unsigned line_bytes() const { return line_bytes_; }

  Line read(std::uint64_t address) const;
  void write(std::uint64_t address, const Line& line);
  std::size_t written_lines() const { return written_; }

 private:
  static constexpr unsigned kChunkLines = 64;
  struct Chunk {
    std::array<Line, kChunkLines> lines{};
    std::uint64_t valid = 0;
  };

  unsigned line_bytes_;
  Initializer init_;
  std::unordered_map<std::uint64_t, std::unique_ptr<Chunk>> chunks_;
  std::size_t written_ = 0;
};

}  // namespace hbmsim
