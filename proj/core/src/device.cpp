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

#include "sharesim/device.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>

namespace sharesim {

void DeviceConfig::validate() const {
    if (num_ports < 2 || num_ports > kMaxPorts)
        throw InvalidArgument("num_ports must be in [2, 64]");
    if (!is_pow2(lock_region_bytes) || lock_region_bytes < kLineBytes)
        throw InvalidArgument("lock_region_bytes must be a power of two >= 64");
    if (hdm_bytes == 0 || hdm_bytes % lock_region_bytes != 0)
        throw InvalidArgument("hdm_bytes must be a positive multiple of lock_region_bytes");
    if (hdm_bytes > kAddrLimit)
        throw InvalidArgument("hdm_bytes exceeds the 52-bit address space");
}

// ---------------------------------------------------------------------------
// LockRegisterFile

void LockRegisterFile::check_index(std::uint64_t lock_idx) const {
    if (lock_idx >= num_words_)
        throw IndexOutOfRange("lock index " + std::to_string(lock_idx) +
                              " >= " + std::to_string(num_words_));
}

std::uint64_t LockRegisterFile::word(std::uint64_t lock_idx) const {
    check_index(lock_idx);
    auto it = words_.find(lock_idx);
    return it == words_.end() ? kLockFree : it->second;
}

void LockRegisterFile::set_word(std::uint64_t lock_idx, std::uint64_t value) {
    check_index(lock_idx);
    if (value == kLockFree)
        words_.erase(lock_idx);
    else
        words_[lock_idx] = value;
}

std::uint64_t LockRegisterFile::test_and_set(PortId port, std::uint64_t lock_idx) {
    const std::uint64_t prior = word(lock_idx);
    if (prior == kLockFree) set_word(lock_idx, port_token(port));
    return prior;
}

CasResult LockRegisterFile::compare_and_swap(PortId port, std::uint64_t lock_idx,
                                             std::uint64_t expected,
                                             std::uint64_t desired) {
    (void)port;  // all ports alias the same word
    if (desired != kLockFree && (desired - 1) >= num_ports_)
        throw InvalidToken("CAS value " + std::to_string(desired) +
                           " is neither free nor a valid port token");
    const std::uint64_t prior = word(lock_idx);
    if (prior == expected) {
        set_word(lock_idx, desired);
        return {prior, true};
    }
    return {prior, false};
}

// ---------------------------------------------------------------------------
// Device

Device::Device(DeviceConfig cfg, std::vector<RemapTable> port_tables)
    : cfg_(cfg),
      tables_(std::move(port_tables)),
      locks_(cfg.num_lock_words(), cfg.num_ports) {
    cfg_.validate();
    if (tables_.size() != cfg_.num_ports)
        throw InvalidArgument("expected one remap table per port");
    for (const auto& t : tables_) {
        for (const auto& e : t.entries()) {
            if (e.device_base + e.length > cfg_.hdm_bytes)
                throw InvalidArgument("remap entry maps past the end of HDM");
        }
    }
}

void Device::check_port(PortId port) const {
    if (port >= cfg_.num_ports)
        throw IndexOutOfRange("port " + std::to_string(port) + " >= " +
                              std::to_string(cfg_.num_ports));
}

void Device::check_region(std::uint64_t region_idx) const {
    if (region_idx >= cfg_.num_lock_words())
        throw IndexOutOfRange("region " + std::to_string(region_idx) + " >= " +
                              std::to_string(cfg_.num_lock_words()));
}

void Device::check_line_bounds(Dpa dpa, std::size_t len) const {
    if (len == 0 || len > kLineBytes)
        throw InvalidArgument("access length must be in [1, 64]");
    if (line_id(dpa) != line_id(dpa + len - 1))
        throw AlignmentError("access straddles a 64-byte line");
    if (dpa + len > cfg_.hdm_bytes)
        throw UnmappedAddress("dpa past the end of HDM");
}

void Device::check_agreement(std::uint64_t region_idx) const {
    auto it = acl_.find(region_idx);
    const std::uint64_t w = locks_.word(region_idx);
    const bool free_word = (w == kLockFree);
    const bool no_holder = (it == acl_.end() || !it->second.holder);
    if (free_word != no_holder ||
        (!no_holder && w != port_token(*it->second.holder)))
        throw SimError("lock word / grant queue disagreement on region " +
                       std::to_string(region_idx));
}

std::uint64_t Device::mmio_test_and_set(PortId port, std::uint64_t lock_idx) {
    check_port(port);
    return locks_.test_and_set(port, lock_idx);
}

CasResult Device::mmio_compare_and_swap(PortId port, std::uint64_t lock_idx,
                                        std::uint64_t expected,
                                        std::uint64_t desired) {
    check_port(port);
    return locks_.compare_and_swap(port, lock_idx, expected, desired);
}

AclResult Device::acl_request_write(PortId port, std::uint64_t region_idx,
                                    TimeNs now, std::uint64_t seq) {
    check_port(port);
    check_region(region_idx);
    auto& acl = acl_[region_idx];
    if (acl.holder && *acl.holder == port) return {true, 0};  // re-entrant
    if (!acl.holder) {
        auto cas = locks_.compare_and_swap(port, region_idx, kLockFree, port_token(port));
        if (!cas.swapped)
            throw SimError("free region with non-free lock word");
        acl.holder = port;
        check_agreement(region_idx);
        return {true, 0};
    }
    for (const auto& w : acl.waiters) {
        if (w.port == port)
            throw DuplicateWaiter("port " + std::to_string(port) +
                                  " is already queued on region " +
                                  std::to_string(region_idx));
    }
    acl.waiters.push_back(Waiter{port, now, seq});
    return {false, acl.waiters.size()};
}

std::optional<Waiter> Device::acl_release_write(PortId port, std::uint64_t region_idx) {
    check_port(port);
    check_region(region_idx);
    auto it = acl_.find(region_idx);
    if (it == acl_.end() || !it->second.holder || *it->second.holder != port)
        throw NotHolder("port " + std::to_string(port) +
                        " does not hold region " + std::to_string(region_idx));
    auto& acl = it->second;
    locks_.set_word(region_idx, kLockFree);
    acl.holder.reset();
    std::optional<Waiter> next;
    if (!acl.waiters.empty()) {
        next = acl.waiters.front();
        acl.waiters.pop_front();
        acl.holder = next->port;
        locks_.set_word(region_idx, port_token(next->port));
    }
    check_agreement(region_idx);
    return next;
}

void Device::acl_cancel(PortId port, std::uint64_t region_idx) {
    check_region(region_idx);
    auto it = acl_.find(region_idx);
    if (it == acl_.end()) return;
    auto& ws = it->second.waiters;
    ws.erase(std::remove_if(ws.begin(), ws.end(),
                            [&](const Waiter& w) { return w.port == port; }),
             ws.end());
}

std::optional<PortId> Device::holder(std::uint64_t region_idx) const {
    check_region(region_idx);
    auto it = acl_.find(region_idx);
    if (it == acl_.end()) return std::nullopt;
    return it->second.holder;
}

std::size_t Device::queue_depth(std::uint64_t region_idx) const {
    auto it = acl_.find(region_idx);
    return it == acl_.end() ? 0 : it->second.waiters.size();
}

std::vector<std::pair<std::uint64_t, std::vector<PortId>>> Device::waiting_sets() const {
    std::vector<std::pair<std::uint64_t, std::vector<PortId>>> out;
    for (const auto& [region, acl] : acl_) {
        if (acl.waiters.empty()) continue;
        std::vector<PortId> ports;
        for (const auto& w : acl.waiters) ports.push_back(w.port);
        out.emplace_back(region, std::move(ports));
    }
    return out;
}

std::vector<std::uint8_t> Device::hdm_read(PortId port, Hpa hpa, std::size_t len) const {
    check_port(port);
    const Dpa dpa = tables_[port].translate_range(hpa, len);
    check_line_bounds(dpa, len);
    std::vector<std::uint8_t> out(len);
    read_dpa(dpa, out);
    return out;
}

WriteResult Device::hdm_write(PortId port, Hpa hpa, std::span<const std::uint8_t> data) {
    check_port(port);
    const Dpa dpa = tables_[port].translate_range(hpa, data.size());
    return write_checked(port, dpa, data);
}

WriteResult Device::write_checked(PortId port, Dpa dpa,
                                  std::span<const std::uint8_t> data) {
    check_port(port);
    check_line_bounds(dpa, data.size());
    const auto h = holder(region_of(dpa));
    write_dpa(dpa, data);
    return {.violation = !(h && *h == port)};
}

void Device::read_dpa(Dpa dpa, std::span<std::uint8_t> out) const {
    if (dpa + out.size() > cfg_.hdm_bytes)
        throw UnmappedAddress("dpa past the end of HDM");
    std::size_t done = 0;
    while (done < out.size()) {
        const std::uint64_t page = (dpa + done) / kPageBytes;
        const std::size_t off = (dpa + done) % kPageBytes;
        const std::size_t n = std::min(out.size() - done, kPageBytes - off);
        auto it = pages_.find(page);
        if (it == pages_.end())
            std::memset(out.data() + done, 0, n);
        else
            std::memcpy(out.data() + done, it->second.data() + off, n);
        done += n;
    }
}

void Device::write_dpa(Dpa dpa, std::span<const std::uint8_t> data) {
    if (dpa + data.size() > cfg_.hdm_bytes)
        throw UnmappedAddress("dpa past the end of HDM");
    std::size_t done = 0;
    while (done < data.size()) {
        const std::uint64_t page = (dpa + done) / kPageBytes;
        const std::size_t off = (dpa + done) % kPageBytes;
        const std::size_t n = std::min(data.size() - done, kPageBytes - off);
        auto it = pages_.find(page);
        if (it == pages_.end()) it = pages_.emplace(page, Page{}).first;
        std::memcpy(it->second.data() + off, data.data() + done, n);
        done += n;
    }
}

std::uint64_t Device::read_word(Dpa dpa) const {
    std::array<std::uint8_t, 8> buf{};
    read_dpa(dpa, buf);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | buf[static_cast<std::size_t>(i)];
    return v;
}

void Device::write_word(Dpa dpa, std::uint64_t value) {
    std::array<std::uint8_t, 8> buf{};
    for (std::size_t i = 0; i < 8; ++i) buf[i] = static_cast<std::uint8_t>(value >> (8 * i));
    write_dpa(dpa, buf);
}

std::array<std::uint8_t, kLineBytes> Device::read_line(Dpa dpa) const {
    std::array<std::uint8_t, kLineBytes> line{};
    read_dpa(line_base(dpa), line);
    return line;
}

std::uint64_t Device::zeroize_region(std::uint64_t region_idx) {
    check_region(region_idx);
    if (holder(region_idx))
        throw RegionHeld("region " + std::to_string(region_idx) +
                         " has an outstanding write grant");
    const Dpa begin = region_idx * cfg_.lock_region_bytes;
    const Dpa end = begin + cfg_.lock_region_bytes;
    std::uint64_t cleared = 0;
    for (std::uint64_t page = begin / kPageBytes; page * kPageBytes < end; ++page) {
        auto it = pages_.find(page);
        if (it == pages_.end()) continue;  // never touched, nothing to clear
        const Dpa page_begin = page * kPageBytes;
        const Dpa lo = std::max(begin, page_begin);
        const Dpa hi = std::min(end, page_begin + kPageBytes);
        if (lo == page_begin && hi == page_begin + kPageBytes) {
            pages_.erase(it);
        } else {
            std::memset(it->second.data() + (lo - page_begin), 0, hi - lo);
        }
        cleared += hi - lo;
    }
    return cleared;
}

Dpa Device::translate(PortId port, Hpa hpa, Addr len) const {
    check_port(port);
    return tables_[port].translate_range(hpa, len);
}

const RemapTable& Device::table(PortId port) const {
    check_port(port);
    return tables_[port];
}

}  // namespace sharesim
