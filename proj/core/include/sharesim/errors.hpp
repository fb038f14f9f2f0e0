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
#include <stdexcept>
#include <string>
#include <vector>

namespace sharesim {

/// Base class for every error raised by the library.
class SimError : public std::runtime_error {
  public:
    explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

#define SHARESIM_ERROR(Name)                                                 \
    class Name : public SimError {                                           \
      public:                                                                \
        explicit Name(const std::string& what) : SimError(what) {}           \
    }

// Address mapping
SHARESIM_ERROR(AlignmentError);
SHARESIM_ERROR(UnmappedAddress);

// Device / access control
SHARESIM_ERROR(IndexOutOfRange);
SHARESIM_ERROR(InvalidToken);
SHARESIM_ERROR(DuplicateWaiter);
SHARESIM_ERROR(NotHolder);
SHARESIM_ERROR(RegionHeld);

// Coherence
SHARESIM_ERROR(SoftwareManagedAddress);
SHARESIM_ERROR(HardwareCoherentAddress);

// Engine
SHARESIM_ERROR(TimeTravel);
SHARESIM_ERROR(TooManyOps);

// PGAS
SHARESIM_ERROR(HeapTooSmall);
SHARESIM_ERROR(OutOfHeap);
SHARESIM_ERROR(CollectiveMismatch);
SHARESIM_ERROR(OutOfBounds);
SHARESIM_ERROR(MisalignedAtomic);
SHARESIM_ERROR(SoftwareManagedAtomic);

// Driver
SHARESIM_ERROR(DuplicateApp);
SHARESIM_ERROR(UnknownRegion);
SHARESIM_ERROR(PermissionUnsupported);
SHARESIM_ERROR(NotMapped);
SHARESIM_ERROR(ReadOnlyRegion);

// Workload / contract misuse
SHARESIM_ERROR(InvalidArgument);
SHARESIM_ERROR(ParseError);

#undef SHARESIM_ERROR

/// Two remap entries collide in host or device space.
class OverlapError : public SimError {
  public:
    enum class Space { Host, Device };

    OverlapError(Space space, std::size_t first, std::size_t second,
                 const std::string& what)
        : SimError(what), space(space), first_entry(first), second_entry(second) {}

    Space space;
    std::size_t first_entry;   // index into the caller-provided entry list
    std::size_t second_entry;
};

struct ValidationIssue {
    std::string field;   // dotted path, e.g. "coherence.precise_ranges"
    std::string reason;
};

/// Carries every validation problem found in a config, not just the first.
class ConfigError : public SimError {
  public:
    explicit ConfigError(std::vector<ValidationIssue> issues)
        : SimError(join(issues)), issues(std::move(issues)) {}

    std::vector<ValidationIssue> issues;

  private:
    static std::string join(const std::vector<ValidationIssue>& issues) {
        std::string out = "invalid configuration:";
        for (const auto& i : issues) out += "\n  " + i.field + ": " + i.reason;
        return out;
    }
};

}  // namespace sharesim
