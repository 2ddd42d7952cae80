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

#include <algorithm>
#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include "jitscan/region.hpp"
#include "jitscan/walk.hpp"

namespace jitscan {

/// One short jump found inside an immediate. target_offset is always
/// jump_offset + 2 + rel8 and always lands inside the region.
struct JumpLink {
    std::uint32_t jump_offset = 0;
    std::uint8_t opcode = 0;  // EB or 70..7F
    std::int8_t rel8 = 0;
    std::uint32_t target_offset = 0;

    bool operator==(const JumpLink&) const = default;
};

/// A validated chain of short jumps riding inside successive immediates.
/// Each link's target lands in the window that produced the next link.
struct JumpChain {
    std::vector<JumpLink> links;

    bool operator==(const JumpChain&) const = default;
};

namespace detail {
// How far past a jump's landing point we look for the next jump opcode:
// one 5-byte spray slot plus slack.
constexpr std::size_t kChainWindow = 8;
}  // namespace detail

/// Collects candidate short-jump sites hiding inside the immediates of
/// instructions reached from the given anchor walks. A site qualifies when
/// the byte is EB/70..7F, its rel8 is readable, and the jump target stays
/// inside the region. Ascending, unique.
inline std::vector<std::uint32_t> scan_immediates_for_jumps(const Region& region,
                                                            const std::vector<std::uint32_t>& anchors,
                                                            const ScanConfig& config) {
    std::vector<std::uint32_t> candidates;
    const auto bytes = region.view();
    for (std::uint32_t anchor : anchors) {
        detail::walk_anchor(bytes, anchor, config, &candidates);
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    return candidates;
}

/// Follows jumps from a candidate site: land, scan a small forward window
/// for the next short-jump opcode, repeat. Revisiting an offset ends the
/// traversal, so hostile inputs cannot loop. Returns the chain only when
/// it reaches config.chain_min_len links.
inline std::optional<JumpChain> validate_jump_chain(const Region& region, std::uint32_t start,
                                                    const ScanConfig& config) {
    const auto bytes = region.view();
    const std::size_t size = bytes.size();

    JumpChain chain;
    std::unordered_set<std::uint32_t> visited;
    std::uint32_t site = start;

    while (site + 1 < size && is_short_jump(bytes[site]) && visited.insert(site).second) {
        const auto rel8 = static_cast<std::int8_t>(bytes[site + 1]);
        const std::int64_t target = static_cast<std::int64_t>(site) + 2 + rel8;
        if (target < 0 || target >= static_cast<std::int64_t>(size)) break;
        chain.links.push_back(JumpLink{site, bytes[site], rel8,
                                       static_cast<std::uint32_t>(target)});

        // Look for the next jump within the landing window.
        bool found = false;
        const std::size_t window_end =
            std::min(static_cast<std::size_t>(target) + detail::kChainWindow, size);
        for (std::size_t p = static_cast<std::size_t>(target); p < window_end; ++p) {
            if (is_short_jump(bytes[p]) && p + 1 < size) {
                site = static_cast<std::uint32_t>(p);
                found = true;
                break;
            }
        }
        if (!found) break;
    }

    if (chain.links.size() >= config.chain_min_len) return chain;
    return std::nullopt;
}

/// Candidate collection plus validation: the chains reported for a region.
/// Sites already absorbed into an earlier chain are not re-validated, so
/// one sprayed chain is reported once rather than per suffix.
inline std::vector<JumpChain> find_jump_chains(const Region& region,
                                               const std::vector<std::uint32_t>& anchors,
                                               const ScanConfig& config) {
    std::vector<JumpChain> chains;
    const auto candidates = scan_immediates_for_jumps(region, anchors, config);
    std::unordered_set<std::uint32_t> consumed;
    for (std::uint32_t site : candidates) {
        if (consumed.count(site)) continue;
        if (auto chain = validate_jump_chain(region, site, config)) {
            for (const auto& link : chain->links) consumed.insert(link.jump_offset);
            chains.push_back(std::move(*chain));
        }
    }
    return chains;
}

}  // namespace jitscan
