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
#include <map>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "sharesim/errors.hpp"
#include "sharesim/types.hpp"

namespace sharesim {

/// Half-open DPA range [begin, end).
struct DpaRange {
    Dpa begin = 0;
    Dpa end = 0;

    bool contains(Dpa dpa) const { return dpa >= begin && dpa < end; }
    Addr size() const { return end - begin; }
    bool operator==(const DpaRange&) const = default;
};

enum class FilterKind { Precise, Imprecise, Hybrid };

enum class Classification { HardwareCoherent, SoftwareManaged };

/// Sharer-tracking configuration. Precise tracks 64-byte lines across the
/// whole HDM; Imprecise tracks coarser units; Hybrid tracks the designated
/// ranges precisely and leaves everything else to software coherence.
struct FilterMode {
    FilterKind kind = FilterKind::Precise;
    Addr granularity_bytes = kPageBytes;     // imprecise tracking unit
    std::vector<DpaRange> precise_ranges;    // hybrid only

    static FilterMode precise() { return {}; }
    static FilterMode imprecise(Addr granularity) {
        return {FilterKind::Imprecise, granularity, {}};
    }
    static FilterMode hybrid(std::vector<DpaRange> ranges) {
        return {FilterKind::Hybrid, kPageBytes, std::move(ranges)};
    }

    void validate() const;
    bool operator==(const FilterMode&) const = default;
};

enum class LineState { Shared, Modified };

struct CachedLine {
    LineState state = LineState::Shared;
    std::array<std::uint8_t, kLineBytes> data{};
};

/// One host's cache of 64-byte HDM lines. Unbounded by default; when a
/// capacity is set, inserts evict a uniformly random resident line using the
/// supplied RNG so runs stay reproducible under a seed.
class HostCache {
  public:
    explicit HostCache(std::size_t capacity_lines = 0) : capacity_(capacity_lines) {}

    const CachedLine* lookup(std::uint64_t line) const;
    bool holds(std::uint64_t line) const { return lookup(line) != nullptr; }
    void insert(std::uint64_t line, LineState state,
                std::span<const std::uint8_t, kLineBytes> data,
                std::mt19937_64* evict_rng = nullptr);
    bool invalidate(std::uint64_t line);
    /// Drops every resident line whose id falls in [first_line, last_line].
    std::size_t invalidate_line_range(std::uint64_t first_line, std::uint64_t last_line);
    std::size_t size() const { return lines_.size(); }
    const std::map<std::uint64_t, CachedLine>& lines() const { return lines_; }

  private:
    std::map<std::uint64_t, CachedLine> lines_;
    std::size_t capacity_;
};

enum class SnoopNecessity { Necessary, Unnecessary };

/// One Back-Invalidation snoop: invalidate `line` in `target`'s cache.
/// Unnecessary means the target did not hold the exact 64-byte line when the
/// snoop was issued, i.e. the snoop is an artifact of coarse tracking.
struct BiSnoop {
    HostId target = 0;
    std::uint64_t line = 0;
    TimeNs issue_time = 0;
    SnoopNecessity necessity = SnoopNecessity::Necessary;
};

/// Sharer directory plus per-host caches. All mutation happens on the event
/// engine thread; queries are safe once a run has completed.
class CoherenceController {
  public:
    CoherenceController(FilterMode mode, std::uint32_t num_hosts,
                        std::size_t cache_capacity_lines = 0,
                        std::uint64_t eviction_seed = 0,
                        std::uint32_t entry_base_bytes = 8);

    Classification classify(Dpa dpa) const;

    /// Tracks a read of a hardware-coherent line: the host joins the unit's
    /// sharer set and the line is cached Shared. Idempotent per host.
    void record_read(HostId host, Dpa dpa,
                     std::span<const std::uint8_t, kLineBytes> line_data);
    void record_read(HostId host, Dpa dpa);  // zero-filled convenience

    /// Computes and applies the BI snoops for a write:
    ///   - one snoop per sharer of the written unit other than the writer;
    ///   - precise units drop the exact line and clear the snooped host from
    ///     the sharer set;
    ///   - coarse units drop every line of the target inside the unit and
    ///     retain the host in the sharer set (the filter cannot tell when a
    ///     host's last line in the unit is gone, so it stays conservative —
    ///     this keeps the snooped set a superset of the precise one on any
    ///     access history);
    ///   - the writer's cache gains the line as Modified.
    /// Throws SoftwareManagedAddress for addresses outside hardware coherence.
    std::vector<BiSnoop> snoops_for_write(
        HostId writer, Dpa dpa, TimeNs now,
        std::span<const std::uint8_t, kLineBytes> new_line);

    /// Drops the host's cached lines inside a software-managed range and
    /// returns how many were invalidated. Throws HardwareCoherentAddress when
    /// any part of the range is hardware coherent.
    std::size_t software_flush(HostId host, DpaRange range);

    /// Metadata footprint: entries * (entry_base_bytes + ceil(num_hosts/8)).
    std::uint64_t directory_footprint() const;
    std::uint64_t entry_count() const { return directory_.size(); }
    std::uint64_t per_entry_bytes() const;

    // Cache path shared with software-managed ranges.
    const CachedLine* cache_lookup(HostId host, Dpa dpa) const;
    void cache_fill(HostId host, Dpa dpa, LineState state,
                    std::span<const std::uint8_t, kLineBytes> data);
    /// Administrative wipe (zeroization): drops all cached copies in the
    /// range on every host and clears sharer bits. Not a BI snoop.
    void drop_range_all_hosts(DpaRange range);

    SharerMask sharers_of(Dpa dpa) const;
    Addr tracking_unit_bytes() const { return unit_bytes_; }
    const FilterMode& mode() const { return mode_; }
    HostCache& cache(HostId host) { return caches_.at(host); }
    const HostCache& cache(HostId host) const { return caches_.at(host); }
    std::uint32_t num_hosts() const { return static_cast<std::uint32_t>(caches_.size()); }

  private:
    std::uint64_t unit_of(Dpa dpa) const { return dpa / unit_bytes_; }

    FilterMode mode_;
    Addr unit_bytes_;  // 64 for precise/hybrid, granularity for imprecise
    std::uint32_t entry_base_bytes_;
    std::map<std::uint64_t, SharerMask> directory_;  // unit id -> sharers
    std::vector<HostCache> caches_;
    std::mt19937_64 evict_rng_;
};

}  // namespace sharesim
