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
#include <vector>

#include "jitscan/chainscan.hpp"
#include "jitscan/config.hpp"
#include "jitscan/region.hpp"
#include "jitscan/walk.hpp"

namespace jitscan {

enum class Verdict : std::uint8_t { Clean, Shellcode };

inline const char* to_string(Verdict v) {
    return v == Verdict::Shellcode ? "shellcode" : "clean";
}

/// One anchor whose walk tripped the bad-instruction threshold.
struct Hit {
    std::uint32_t anchor_offset = 0;
    std::uint32_t num_instr = 0;
    std::uint32_t num_badinstr = 0;
    EndReason end_reason = EndReason::Terminator;

    bool operator==(const Hit&) const = default;
};

struct DetectionReport {
    std::uint32_t region_base = 0;
    std::vector<Hit> hits;
    std::vector<JumpChain> chains;
    Verdict verdict = Verdict::Clean;

    bool operator==(const DetectionReport&) const = default;
};

/// Heuristic shellcode scan of one region. For every `mov reg,imm32`
/// signature hit, disassembles forward counting instructions that use a
/// 32-bit immediate (later mov reg,imm32 included) until a terminator, the
/// instruction budget, or the end of the region; an anchor becomes a hit
/// when its count strictly exceeds config.max_ibadnum. Jump-chain
/// validation over the walked immediates runs when config.chainscan is on.
/// Pure: identical inputs give identical reports.
inline DetectionReport scan_region(const Region& region, const ScanConfig& config) {
    DetectionReport report;
    report.region_base = region.base;
    const auto bytes = region.view();
    if (bytes.empty()) return report;

    const auto anchors = detail::collect_anchors(bytes, config);
    for (std::uint32_t anchor : anchors) {
        const AnchorWalk walk = detail::walk_anchor(bytes, anchor, config);
        if (walk.num_badinstr > config.max_ibadnum) {
            report.hits.push_back(Hit{walk.anchor, walk.num_instr, walk.num_badinstr,
                                      walk.end_reason});
        }
    }
    if (config.chainscan) {
        report.chains = find_jump_chains(region, anchors, config);
    }
    report.verdict = (!report.hits.empty() || !report.chains.empty()) ? Verdict::Shellcode
                                                                     : Verdict::Clean;
    return report;
}

}  // namespace jitscan
