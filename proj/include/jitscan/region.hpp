/*
Copyright 2026 jitscan contributors
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
you may obtain a copy of the License at

                http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace jitscan {

enum class Protection : std::uint8_t { RWX, RX, RW, R, NONE };

inline const char* to_string(Protection p) {
    switch (p) {
    case Protection::RWX: return "RWX";
    case Protection::RX: return "RX";
    case Protection::RW: return "RW";
    case Protection::R: return "R";
    case Protection::NONE: return "NONE";
    }
    return "?";
}

/// A snapshot of one contiguous code region: what the JIT engine just made
/// executable, as seen at scan time.
struct Region {
    std::uint32_t base = 0;
    std::vector<std::uint8_t> bytes;
    Protection protection = Protection::RX;

    std::span<const std::uint8_t> view() const { return bytes; }
};

}  // namespace jitscan
