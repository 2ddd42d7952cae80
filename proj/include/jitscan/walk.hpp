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
#include <vector>

#include "jitscan/config.hpp"
#include "jitscan/decoder.hpp"

namespace jitscan {

/// Why a forward walk from an anchor stopped.
enum class EndReason : std::uint8_t { Terminator, Budget, BufferEnd };

inline const char* to_string(EndReason r) {
    switch (r) {
    case EndReason::Terminator: return "terminator";
    case EndReason::Budget: return "budget";
    case EndReason::BufferEnd: return "buffer_end";
    }
    return "?";
}

/// One anchor's forward disassembly: instructions seen, how many used a
/// 32-bit immediate, and what stopped the walk.
struct AnchorWalk {
    std::uint32_t anchor = 0;
    std::uint32_t num_instr = 0;
    std::uint32_t num_badinstr = 0;
    EndReason end_reason = EndReason::BufferEnd;
};

constexpr bool is_short_jump(std::uint8_t b) {
    return b == 0xEB || (b >= 0x70 && b <= 0x7F);  // jmp rel8 / jcc rel8
}

namespace detail {

// Anchor candidates for the detector: every B8..BF signature hit, plus
// C7 /0 sites when enabled. Ascending, unique.
inline std::vector<std::uint32_t> collect_anchors(std::span<const std::uint8_t> bytes,
                                                  const ScanConfig& config) {
    if (!config.anchor_c7) return find_mov_anchors(bytes);
    std::vector<std::uint32_t> anchors;
    const std::size_t size = bytes.size();
    for (std::size_t i = 0; i < size; ++i) {
        if ((bytes[i] & 0xF8) == 0xB8 && i + 5 <= size) {
            anchors.push_back(static_cast<std::uint32_t>(i));
        } else if (bytes[i] == 0xC7 && i + 6 <= size && ((bytes[i + 1] >> 3) & 7) == 0) {
            anchors.push_back(static_cast<std::uint32_t>(i));
        }
    }
    return anchors;
}

// The core counting loop: decode the anchor, then disassemble forward
// counting immediate-operand instructions until a terminator, the
// instruction budget, or the end of the buffer. Undecodable bytes end the
// walk like a terminator. When `candidates` is given, the 4 immediate
// bytes of every imm32-carrying instruction on the walk (the anchor
// included) are checked for embedded short-jump opcodes whose rel8 target
// stays inside the region; matching positions are appended.
inline AnchorWalk walk_anchor(std::span<const std::uint8_t> bytes, std::uint32_t anchor,
                              const ScanConfig& config,
                              std::vector<std::uint32_t>* candidates = nullptr) {
    const std::size_t size = bytes.size();
    AnchorWalk walk;
    walk.anchor = anchor;

    auto inspect_immediate = [&](const DecodedInstr& instr) {
        if (!candidates || !instr.imm32) return;
        const std::size_t imm_begin = instr.offset + instr.length - 4;
        for (std::size_t p = imm_begin; p < imm_begin + 4; ++p) {
            if (!is_short_jump(bytes[p]) || p + 1 >= size) continue;
            const auto rel8 = static_cast<std::int8_t>(bytes[p + 1]);
            const std::int64_t target = static_cast<std::int64_t>(p) + 2 + rel8;
            if (target >= 0 && target < static_cast<std::int64_t>(size)) {
                candidates->push_back(static_cast<std::uint32_t>(p));
            }
        }
    };

    const DecodedInstr head = decode_at(bytes, anchor);
    if (head.cls == InstrClass::Undecodable) {
        walk.end_reason = EndReason::Terminator;
        return walk;
    }
    if (config.count_anchor) ++walk.num_badinstr;
    inspect_immediate(head);

    std::size_t pos = anchor + head.length;
    while (true) {
        if (walk.num_instr >= config.max_inum) {
            walk.end_reason = EndReason::Budget;
            return walk;
        }
        if (pos >= size) {
            walk.end_reason = EndReason::BufferEnd;
            return walk;
        }
        const DecodedInstr instr = decode_at(bytes, pos);
        if (instr.cls == InstrClass::Terminator || instr.cls == InstrClass::Undecodable) {
            walk.end_reason = EndReason::Terminator;
            return walk;
        }
        if (instr.cls == InstrClass::Imm32Op || instr.cls == InstrClass::MovRegImm32) {
            ++walk.num_badinstr;
        }
        inspect_immediate(instr);
        ++walk.num_instr;
        pos += instr.length;
    }
}

}  // namespace detail
}  // namespace jitscan
