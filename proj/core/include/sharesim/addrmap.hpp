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

#include <cstddef>
#include <vector>

#include "sharesim/errors.hpp"
#include "sharesim/types.hpp"

namespace sharesim {

/// One contiguous window of host physical address space mapped onto device
/// HDM space. Bases and length are multiples of 64 bytes.
struct RemapEntry {
    Hpa host_base = 0;
    Dpa device_base = 0;
    Addr length = 0;

    bool operator==(const RemapEntry&) const = default;
};

/// Per-port HPA<->DPA relation. Entries are sparse, non-overlapping in both
/// address spaces, and kept sorted by host base. Immutable once built, so
/// tables can be shared freely across threads.
class RemapTable {
  public:
    RemapTable() = default;

    /// Validates and sorts the entries. Throws OverlapError when two entries
    /// collide in host or device space (indices refer to the input order) and
    /// AlignmentError for empty input or lengths that are not positive
    /// multiples of 64 bytes.
    static RemapTable build(PortId port_id, std::vector<RemapEntry> entries);

    /// Forward translation. Throws UnmappedAddress when hpa lies outside
    /// every entry.
    Dpa hpa_to_dpa(Hpa hpa) const;

    /// Exact inverse of hpa_to_dpa on mapped ranges.
    Hpa dpa_to_hpa(Dpa dpa) const;

    /// Translates an access of `len` bytes. The whole range must fall inside
    /// one entry; straddling an entry boundary signals a workload bug and is
    /// rejected with UnmappedAddress.
    Dpa translate_range(Hpa hpa, Addr len) const;

    PortId port_id() const { return port_id_; }
    const std::vector<RemapEntry>& entries() const { return entries_; }
    bool operator==(const RemapTable&) const = default;

  private:
    PortId port_id_ = 0;
    std::vector<RemapEntry> entries_;          // sorted by host_base
    std::vector<std::size_t> device_order_;    // entry indices sorted by device_base
};

/// floor(dpa / unit_bytes). unit_bytes must be a power of two >= 64.
std::uint64_t unit_index(Dpa dpa, Addr unit_bytes);

/// Line/page/region sizing shared by the device and the snoop filter.
struct GranularityConfig {
    Addr line_bytes = kLineBytes;    // fixed
    Addr page_bytes = kPageBytes;
    Addr region_bytes = kPageBytes;  // lock granularity

    /// line_bytes is fixed at 64; page_bytes a line multiple; region_bytes a
    /// power of two >= line_bytes. Regions smaller than a page are allowed
    /// (fine-granularity lock sweeps); at or above page size the region must
    /// be a page multiple.
    void validate() const;

    bool operator==(const GranularityConfig&) const = default;
};

}  // namespace sharesim
