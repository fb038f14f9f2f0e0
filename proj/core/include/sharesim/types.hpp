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

#include <cstdint>

namespace sharesim {

/// Byte address. Valid addresses occupy the low 52 bits of a 64-bit word,
/// which covers any realistic HDM size while keeping arithmetic exact.
using Addr = std::uint64_t;
/// Host physical address, as seen by one host through its CXL port.
using Hpa = Addr;
/// Device physical address inside the HDM.
using Dpa = Addr;

using TimeNs = std::uint64_t;
using PortId = std::uint32_t;
using HostId = std::uint32_t;
using AppId = std::uint32_t;
using PeId = std::uint32_t;

/// Bitmask over hosts; one bit per host, host ids < 64.
using SharerMask = std::uint64_t;

inline constexpr Addr kLineBytes = 64;
inline constexpr Addr kPageBytes = 4096;
inline constexpr int kAddrBits = 52;
inline constexpr Addr kAddrLimit = Addr{1} << kAddrBits;

/// Upper bound on ports/hosts so sharer sets fit in one 64-bit mask.
inline constexpr std::uint32_t kMaxPorts = 64;

constexpr bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

constexpr Addr round_up(Addr v, Addr align) {
    return (v + align - 1) / align * align;
}

constexpr std::uint64_t line_id(Dpa dpa) { return dpa / kLineBytes; }
constexpr Dpa line_base(Dpa dpa) { return dpa & ~(kLineBytes - 1); }

}  // namespace sharesim
