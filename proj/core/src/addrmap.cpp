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

#include "sharesim/addrmap.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace sharesim {

namespace {

std::string hex(Addr v) {
    std::ostringstream os;
    os << "0x" << std::hex << v;
    return os.str();
}

// Sorts input indices by `base(entry)` and reports the first adjacent overlap.
template <typename BaseFn>
void check_overlap(const std::vector<RemapEntry>& entries, BaseFn base,
                   OverlapError::Space space, const char* space_name) {
    std::vector<std::size_t> order(entries.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return base(entries[a]) < base(entries[b]);
    });
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        const auto i = order[k];
        const auto j = order[k + 1];
        if (base(entries[i]) + entries[i].length > base(entries[j])) {
            std::ostringstream os;
            os << "remap entries " << i << " and " << j << " overlap in "
               << space_name << " space: [" << hex(base(entries[i])) << ", "
               << hex(base(entries[i]) + entries[i].length) << ") vs ["
               << hex(base(entries[j])) << ", "
               << hex(base(entries[j]) + entries[j].length) << ")";
            throw OverlapError(space, i, j, os.str());
        }
    }
}

}  // namespace

RemapTable RemapTable::build(PortId port_id, std::vector<RemapEntry> entries) {
    if (entries.empty())
        throw AlignmentError("remap table needs at least one entry");
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        std::ostringstream os;
        os << "remap entry " << i << ": ";
        if (e.length == 0 || e.length % kLineBytes != 0) {
            os << "length " << hex(e.length)
               << " is not a positive multiple of 64 bytes";
            throw AlignmentError(os.str());
        }
        if (e.host_base % kLineBytes != 0 || e.device_base % kLineBytes != 0) {
            os << "bases must be 64-byte aligned";
            throw AlignmentError(os.str());
        }
        if (e.host_base + e.length > kAddrLimit ||
            e.device_base + e.length > kAddrLimit) {
            os << "range exceeds the 52-bit address space";
            throw AlignmentError(os.str());
        }
    }
    check_overlap(entries, [](const RemapEntry& e) { return e.host_base; },
                  OverlapError::Space::Host, "host");
    check_overlap(entries, [](const RemapEntry& e) { return e.device_base; },
                  OverlapError::Space::Device, "device");

    RemapTable t;
    t.port_id_ = port_id;
    std::sort(entries.begin(), entries.end(),
              [](const RemapEntry& a, const RemapEntry& b) {
                  return a.host_base < b.host_base;
              });
    t.entries_ = std::move(entries);
    t.device_order_.resize(t.entries_.size());
    std::iota(t.device_order_.begin(), t.device_order_.end(), 0);
    std::sort(t.device_order_.begin(), t.device_order_.end(),
              [&](std::size_t a, std::size_t b) {
                  return t.entries_[a].device_base < t.entries_[b].device_base;
              });
    return t;
}

Dpa RemapTable::hpa_to_dpa(Hpa hpa) const {
    // First entry with host_base > hpa; candidate is its predecessor.
    auto it = std::upper_bound(
        entries_.begin(), entries_.end(), hpa,
        [](Hpa v, const RemapEntry& e) { return v < e.host_base; });
    if (it != entries_.begin()) {
        const auto& e = *std::prev(it);
        if (hpa < e.host_base + e.length)
            return e.device_base + (hpa - e.host_base);
    }
    throw UnmappedAddress("hpa " + hex(hpa) + " is not mapped on port " +
                          std::to_string(port_id_));
}

Hpa RemapTable::dpa_to_hpa(Dpa dpa) const {
    auto it = std::upper_bound(
        device_order_.begin(), device_order_.end(), dpa,
        [&](Dpa v, std::size_t idx) { return v < entries_[idx].device_base; });
    if (it != device_order_.begin()) {
        const auto& e = entries_[*std::prev(it)];
        if (dpa >= e.device_base && dpa < e.device_base + e.length)
            return e.host_base + (dpa - e.device_base);
    }
    throw UnmappedAddress("dpa " + hex(dpa) + " is not mapped on port " +
                          std::to_string(port_id_));
}

Dpa RemapTable::translate_range(Hpa hpa, Addr len) const {
    if (len == 0) throw InvalidArgument("zero-length access");
    const Dpa first = hpa_to_dpa(hpa);
    const Dpa last = hpa_to_dpa(hpa + len - 1);
    if (last - first != len - 1)
        throw UnmappedAddress("access [" + hex(hpa) + ", " + hex(hpa + len) +
                              ") straddles a remap entry boundary");
    return first;
}

std::uint64_t unit_index(Dpa dpa, Addr unit_bytes) {
    if (!is_pow2(unit_bytes) || unit_bytes < kLineBytes)
        throw InvalidArgument("unit_bytes must be a power of two >= 64");
    return dpa / unit_bytes;
}

void GranularityConfig::validate() const {
    if (line_bytes != kLineBytes)
        throw InvalidArgument("line_bytes is fixed at 64");
    if (page_bytes == 0 || page_bytes % line_bytes != 0)
        throw InvalidArgument("page_bytes must be a positive line multiple");
    if (!is_pow2(region_bytes) || region_bytes < line_bytes)
        throw InvalidArgument("region_bytes must be a power of two >= 64");
    if (region_bytes >= page_bytes && region_bytes % page_bytes != 0)
        throw InvalidArgument("region_bytes must be a page multiple");
}

}  // namespace sharesim
