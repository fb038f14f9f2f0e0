/*
 * Copyright 2026 The sharesim authors
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

#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "sharesim/addrmap.hpp"
#include "sharesim/types.hpp"

namespace sharesim {

struct DeviceConfig {
    std::uint32_t num_ports = 2;
    Addr hdm_bytes = 1u << 20;
    Addr lock_region_bytes = kPageBytes;

    std::uint64_t num_lock_words() const { return hdm_bytes / lock_region_bytes; }
    void validate() const;

    bool operator==(const DeviceConfig&) const = default;
};

/// Atomics word values: 0 = free, k+1 = held by port k.
inline constexpr std::uint64_t kLockFree = 0;
constexpr std::uint64_t port_token(PortId port) { return std::uint64_t{port} + 1; }

struct CasResult {
    std::uint64_t prior = 0;
    bool swapped = false;
};

/// The per-port MMIO atomics registers. All ports alias one shared word per
/// lockable region; the word array is materialized sparsely with an all-zero
/// (free) default.
class LockRegisterFile {
  public:
    LockRegisterFile(std::uint64_t num_words, std::uint32_t num_ports)
        : num_words_(num_words), num_ports_(num_ports) {}

    /// If the word is free it becomes the caller's token and 0 is returned;
    /// otherwise the word is unchanged and its current value is returned.
    std::uint64_t test_and_set(PortId port, std::uint64_t lock_idx);

    /// Swaps to `desired` iff the word equals `expected`. `desired` must be 0
    /// or a valid port token.
    CasResult compare_and_swap(PortId port, std::uint64_t lock_idx,
                               std::uint64_t expected, std::uint64_t desired);

    std::uint64_t word(std::uint64_t lock_idx) const;
    void set_word(std::uint64_t lock_idx, std::uint64_t value);
    std::uint64_t num_words() const { return num_words_; }

  private:
    void check_index(std::uint64_t lock_idx) const;

    std::uint64_t num_words_;
    std::uint32_t num_ports_;
    std::unordered_map<std::uint64_t, std::uint64_t> words_;  // absent == 0
};

struct Waiter {
    PortId port;
    TimeNs enqueue_time;
    std::uint64_t enqueue_seq;
};

struct AclResult {
    bool granted = false;
    std::size_t position = 0;  // 1-based queue position when not granted
};

struct WriteResult {
    bool violation = false;  // write issued without holding the region grant
};

/// N-headed Type-3 device: sparse HDM byte store, shared lock register file,
/// per-region FIFO grant queues, and per-port address remap.
class Device {
  public:
    Device(DeviceConfig cfg, std::vector<RemapTable> port_tables);

    // -- MMIO atomics ------------------------------------------------------
    std::uint64_t mmio_test_and_set(PortId port, std::uint64_t lock_idx);
    CasResult mmio_compare_and_swap(PortId port, std::uint64_t lock_idx,
                                    std::uint64_t expected, std::uint64_t desired);
    std::uint64_t lock_word(std::uint64_t lock_idx) const { return locks_.word(lock_idx); }

    // -- Access control (single writer / multiple readers) ----------------
    /// Grants immediately when the region is free or already held by the
    /// caller; otherwise appends the caller to the region's FIFO.
    AclResult acl_request_write(PortId port, std::uint64_t region_idx, TimeNs now,
                                std::uint64_t seq = 0);
    /// Releases the caller's grant and promotes the head waiter, if any.
    std::optional<Waiter> acl_release_write(PortId port, std::uint64_t region_idx);
    /// Drops a queued (not granted) request, e.g. on app departure.
    void acl_cancel(PortId port, std::uint64_t region_idx);

    std::optional<PortId> holder(std::uint64_t region_idx) const;
    std::size_t queue_depth(std::uint64_t region_idx) const;
    /// Regions with a waiting queue, in region order (deadlock reporting).
    std::vector<std::pair<std::uint64_t, std::vector<PortId>>> waiting_sets() const;

    // -- Data path ---------------------------------------------------------
    /// Read through a port's remap table. Never blocked by locks. The access
    /// must stay within one 64-byte line.
    std::vector<std::uint8_t> hdm_read(PortId port, Hpa hpa, std::size_t len) const;
    /// Write through a port's remap table. Bytes are stored unconditionally;
    /// the result flags a protocol violation when the caller does not hold
    /// the target region's write grant.
    WriteResult hdm_write(PortId port, Hpa hpa, std::span<const std::uint8_t> data);
    /// DPA-level write with the same grant check (used for PGAS puts).
    WriteResult write_checked(PortId port, Dpa dpa, std::span<const std::uint8_t> data);

    void read_dpa(Dpa dpa, std::span<std::uint8_t> out) const;
    void write_dpa(Dpa dpa, std::span<const std::uint8_t> data);
    std::uint64_t read_word(Dpa dpa) const;   // 8-byte little-endian
    void write_word(Dpa dpa, std::uint64_t value);
    /// Full 64-byte line containing dpa.
    std::array<std::uint8_t, kLineBytes> read_line(Dpa dpa) const;

    /// Clears the region to zero. Only touched pages are actually written;
    /// returns the number of bytes cleared. Throws RegionHeld while a write
    /// grant is outstanding.
    std::uint64_t zeroize_region(std::uint64_t region_idx);

    // -- Addressing --------------------------------------------------------
    Dpa translate(PortId port, Hpa hpa, Addr len) const;
    const RemapTable& table(PortId port) const;
    std::uint64_t region_of(Dpa dpa) const { return dpa / cfg_.lock_region_bytes; }
    const DeviceConfig& config() const { return cfg_; }

  private:
    struct RegionAcl {
        std::optional<PortId> holder;
        std::deque<Waiter> waiters;
    };

    void check_port(PortId port) const;
    void check_region(std::uint64_t region_idx) const;
    void check_line_bounds(Dpa dpa, std::size_t len) const;
    /// Lock word and grant queue must always tell the same story.
    void check_agreement(std::uint64_t region_idx) const;

    DeviceConfig cfg_;
    std::vector<RemapTable> tables_;
    LockRegisterFile locks_;
    std::map<std::uint64_t, RegionAcl> acl_;  // ordered: deterministic reports

    // Sparse page store; absent pages read as zero.
    using Page = std::array<std::uint8_t, kPageBytes>;
    std::unordered_map<std::uint64_t, Page> pages_;
};

}  // namespace sharesim
