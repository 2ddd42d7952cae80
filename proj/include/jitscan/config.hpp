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

namespace jitscan {

/// Detector thresholds and classification toggles. The defaults tolerate
/// benign constant-heavy compiler output (runs of up to max_ibadnum
/// immediate-operand instructions) while still catching any spray big
/// enough to hold a payload.
struct ScanConfig {
    std::uint32_t max_inum = 64;     ///< instruction budget per anchor walk
    std::uint32_t max_ibadnum = 8;   ///< report when bad count exceeds this
    bool count_anchor = false;       ///< count the anchor instruction itself as bad
    bool anchor_c7 = false;          ///< also anchor on C7 /0 (mov r/m32,imm32)
    std::uint32_t chain_min_len = 3; ///< links needed before a jump chain is reported
    bool chainscan = true;           ///< validate jump chains hidden in immediates

    bool operator==(const ScanConfig&) const = default;
};

}  // namespace jitscan
