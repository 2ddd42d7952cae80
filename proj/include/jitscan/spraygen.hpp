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
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "jitscan/region.hpp"
#include "jitscan/walk.hpp"

namespace jitscan {

enum class SprayOperator : std::uint8_t { Xor, Add, Mul, Div };

inline const char* to_string(SprayOperator op) {
    switch (op) {
    case SprayOperator::Xor: return "xor";
    case SprayOperator::Add: return "add";
    case SprayOperator::Mul: return "mul";
    case SprayOperator::Div: return "div";
    }
    return "?";
}

/// cmp al,imm8 — eats the byte that follows when execution enters the
/// immediate, which is why sprayed payload words conventionally carry it
/// as their top byte.
inline constexpr std::uint8_t kSemanticNopByte = 0x3C;

/// Builds a payload word from 24 attacker bytes plus the top filler byte.
constexpr std::uint32_t payload_imm(std::uint32_t low24,
                                    std::uint8_t high = kSemanticNopByte) {
    return (low24 & 0x00FFFFFFu) | (static_cast<std::uint32_t>(high) << 24);
}

struct SprayRecipe {
    SprayOperator op = SprayOperator::Xor;
    std::vector<std::uint32_t> payload;  // imm32 per slot, first feeds the mov
    bool jump_linked = false;            // rewrite high imm bytes into EB rel8 links
    std::uint64_t seed = 0;              // reserved for randomized filler
};

enum class BenignKind : std::uint8_t { JitStub, PrologueHeavy, ConstHeavy, RandomBytes };

inline const char* to_string(BenignKind k) {
    switch (k) {
    case BenignKind::JitStub: return "jit-stub";
    case BenignKind::PrologueHeavy: return "prologue";
    case BenignKind::ConstHeavy: return "const-heavy";
    case BenignKind::RandomBytes: return "random";
    }
    return "?";
}

namespace detail {

class ByteWriter {
public:
    void u8(std::uint8_t b) { bytes_.push_back(b); }
    void u8(std::initializer_list<std::uint8_t> bs) {
        for (auto b : bs) bytes_.push_back(b);
    }
    void le32(std::uint32_t v) {
        bytes_.push_back(static_cast<std::uint8_t>(v));
        bytes_.push_back(static_cast<std::uint8_t>(v >> 8));
        bytes_.push_back(static_cast<std::uint8_t>(v >> 16));
        bytes_.push_back(static_cast<std::uint8_t>(v >> 24));
    }
    void append(const ByteWriter& other) {
        bytes_.insert(bytes_.end(), other.bytes_.begin(), other.bytes_.end());
    }
    std::size_t size() const { return bytes_.size(); }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
};

inline std::uint8_t fp_op_byte(SprayOperator op) {
    switch (op) {
    case SprayOperator::Add: return 0x58;  // addsd
    case SprayOperator::Mul: return 0x59;  // mulsd
    case SprayOperator::Div: return 0x5E;  // divsd
    default: return 0;
    }
}

}  // namespace detail

/// Emits the machine code a JIT compiler produces for a chained operator
/// expression, slot for slot. XOR gives `mov eax,imm32` then one
/// `xor eax,imm32` per remaining payload word; ADD/MUL/DIV interleave each
/// `mov eax,imm32` with the cvtsi2sd/movapd/addsd-style xmm pattern. Blocks
/// end in `ret`. With jump_linked set (XOR only), the high two bytes of
/// every immediate become a short jump that threads execution through the
/// payload slots; the final link lands on the ret.
inline Region gen_spray(const SprayRecipe& recipe) {
    if (recipe.payload.empty()) {
        throw std::invalid_argument("gen_spray: payload must not be empty");
    }
    if (recipe.jump_linked && recipe.op != SprayOperator::Xor) {
        throw std::invalid_argument("gen_spray: jump linking requires the xor operator");
    }

    std::vector<std::uint32_t> imms = recipe.payload;
    if (recipe.jump_linked) {
        const std::size_t n = imms.size();
        for (std::size_t k = 0; k < n; ++k) {
            const std::uint8_t b0 = static_cast<std::uint8_t>(imms[k]);
            const std::uint8_t b1 = static_cast<std::uint8_t>(imms[k] >> 8);
            if (is_short_jump(b0) || is_short_jump(b1)) {
                throw std::invalid_argument(
                    "gen_spray: payload element " + std::to_string(k) +
                    " collides with the jump-link bytes");
            }
            // Slot k's jump lands on slot k+1's payload bytes; the last
            // slot jumps to the trailing ret.
            const std::uint8_t rel8 = (k + 1 < n) ? 0x01 : 0x00;
            imms[k] = (imms[k] & 0x0000FFFFu) | (0xEBu << 16) |
                      (static_cast<std::uint32_t>(rel8) << 24);
        }
    }

    detail::ByteWriter w;
    if (recipe.op == SprayOperator::Xor) {
        w.u8(0xB8);  // mov eax,imm32
        w.le32(imms[0]);
        for (std::size_t k = 1; k < imms.size(); ++k) {
            w.u8(0x35);  // xor eax,imm32
            w.le32(imms[k]);
        }
    } else {
        const std::uint8_t fp = detail::fp_op_byte(recipe.op);
        w.u8(0xB8);
        w.le32(imms[0]);
        w.u8({0xF2, 0x0F, 0x2A, 0xC0});  // cvtsi2sd xmm0,eax
        w.u8({0x66, 0x0F, 0x28, 0xC8});  // movapd xmm1,xmm0
        for (std::size_t k = 1; k < imms.size(); ++k) {
            w.u8(0xB8);
            w.le32(imms[k]);
            w.u8({0xF2, 0x0F, 0x2A, 0xC0});
            w.u8({0xF2, 0x0F, fp, 0xC8});  // addsd/mulsd/divsd xmm1,xmm0
        }
    }
    w.u8(0xC3);  // ret

    Region region;
    region.base = 0x057d0000;
    region.bytes = w.take();
    region.protection = Protection::RX;
    return region;
}

/// Seeded payload words for test corpora: random 24-bit content under the
/// semantic-NOP top byte. jump_safe keeps the low two bytes clear of
/// EB/70..7F so the words survive jump linking.
inline std::vector<std::uint32_t> random_payload(std::size_t count, std::uint64_t seed,
                                                 bool jump_safe = false) {
    std::mt19937_64 rng(seed);
    std::vector<std::uint32_t> payload;
    payload.reserve(count);
    while (payload.size() < count) {
        std::uint32_t low24 = static_cast<std::uint32_t>(rng()) & 0x00FFFFFFu;
        if (jump_safe &&
            (is_short_jump(static_cast<std::uint8_t>(low24)) ||
             is_short_jump(static_cast<std::uint8_t>(low24 >> 8)))) {
            continue;
        }
        payload.push_back(payload_imm(low24));
    }
    return payload;
}

namespace detail {

// The two stub blocks a real JIT emits for trivial call thunks, byte for
// byte, at their original spacing. A scan of these must stay quiet.
inline void emit_jit_stub(ByteWriter& w) {
    // mov edx,[esp+0ch]; mov ecx,[edx]; call -0x7925c381; ret
    w.u8({0x8B, 0x54, 0x24, 0x0C});
    w.u8({0x8B, 0x0A});
    w.u8({0xE8, 0x7F, 0x9C, 0x6D, 0xF8});
    w.u8(0xC3);
    while (w.size() < 0xE0) w.u8(0xCC);  // inter-block heap filler
    // mov edx,[esp+0ch]; push [edx+0ch]; push [edx+8]; push [edx+4];
    // mov ecx,[edx]; call -0x7925ab83; mov eax,4; ret
    w.u8({0x8B, 0x54, 0x24, 0x0C});
    w.u8({0xFF, 0x72, 0x0C});
    w.u8({0xFF, 0x72, 0x08});
    w.u8({0xFF, 0x72, 0x04});
    w.u8({0x8B, 0x0A});
    w.u8({0xE8, 0x7D, 0x54, 0x6D, 0xF8});
    w.u8({0xB8, 0x04, 0x00, 0x00, 0x00});
    w.u8(0xC3);
}

// Byte masks for benign filler material. Values stay below 0x70 so no
// immediate or displacement byte can alias a mov-imm32 head (B8..BF) or a
// short jump (EB, 70..7F); that keeps the corpora clean by construction
// rather than by luck.
constexpr std::uint8_t kBenignByteCap = 0x6F;

inline std::uint8_t benign_byte(std::mt19937_64& rng) {
    return static_cast<std::uint8_t>(rng() % (kBenignByteCap + 1));
}

inline std::uint32_t benign_const(std::mt19937_64& rng) {
    return static_cast<std::uint32_t>(benign_byte(rng)) |
           static_cast<std::uint32_t>(benign_byte(rng)) << 8 |
           static_cast<std::uint32_t>(benign_byte(rng)) << 16 |
           static_cast<std::uint32_t>(benign_byte(rng)) << 24;
}

inline void emit_prologue_heavy(ByteWriter& w, std::size_t size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    // Stack displacements a compiler would emit: small arg/local offsets.
    constexpr std::uint8_t disp[] = {0x04, 0x08, 0x0C, 0x10, 0x14, 0xF8, 0xF4, 0xFC};
    auto d8 = [&] { return disp[rng() % std::size(disp)]; };

    auto emit_function = [&](ByteWriter& f) {
        f.u8({0x55, 0x8B, 0xEC});           // push ebp; mov ebp,esp
        if (rng() % 2) f.u8({0x83, 0xEC, static_cast<std::uint8_t>(8 + 4 * (rng() % 8))});
        if (rng() % 2) f.u8(0x53);          // push ebx
        if (rng() % 2) f.u8(0x56);          // push esi

        int imm_budget = 4;  // keeps any walk inside this function far below threshold
        const int body = 4 + static_cast<int>(rng() % 9);
        for (int i = 0; i < body; ++i) {
            switch (rng() % 10) {
            case 0: f.u8({0x8B, 0x45, d8()}); break;        // mov eax,[ebp+d]
            case 1: f.u8({0x8B, 0x4D, d8()}); break;        // mov ecx,[ebp+d]
            case 2: f.u8({0x89, 0x45, d8()}); break;        // mov [ebp+d],eax
            case 3: f.u8({0x85, 0xC0}); break;              // test eax,eax
            case 4: f.u8({0x33, 0xC0}); break;              // xor eax,eax
            case 5: f.u8({0x83, 0xF8, benign_byte(rng)}); break;  // cmp eax,imm8
            case 6: f.u8(static_cast<std::uint8_t>(0x50 + rng() % 3)); break;  // push r
            case 7:  // call rel32, short forward distance
                f.u8(0xE8);
                f.u8({benign_byte(rng), benign_byte(rng), 0x00, 0x00});
                break;
            case 8:
                if (imm_budget > 0) {
                    --imm_budget;
                    f.u8(0xB8);  // mov eax,const
                    f.le32(benign_const(rng));
                } else {
                    f.u8({0x8B, 0x55, d8()});  // mov edx,[ebp+d]
                }
                break;
            case 9:
                if (imm_budget > 0) {
                    --imm_budget;
                    f.u8(0x68);  // push const
                    f.le32(benign_const(rng));
                } else {
                    f.u8(0x90);
                }
                break;
            }
        }
        if (rng() % 2) f.u8(0x5E);          // pop esi
        if (rng() % 2) f.u8(0x5B);          // pop ebx
        f.u8({0x8B, 0xE5, 0x5D});           // mov esp,ebp; pop ebp
        if (rng() % 3 == 0) {
            f.u8({0xC2, static_cast<std::uint8_t>(4 * (1 + rng() % 4)), 0x00});
        } else {
            f.u8(0xC3);
        }
    };

    for (;;) {
        ByteWriter fn;
        emit_function(fn);
        if (w.size() + fn.size() > size) break;
        w.append(fn);
    }
    while (w.size() < size) w.u8(0xCC);
}

inline void emit_const_heavy(ByteWriter& w, std::size_t size, std::uint64_t seed,
                             std::uint32_t run_cap) {
    std::mt19937_64 rng(seed);
    bool first = true;
    while (w.size() + 16 + 6 * run_cap < size) {
        w.u8(0xB8);  // block head: mov eax,const
        w.le32(benign_const(rng));
        // First block sits exactly at the threshold; later blocks vary.
        const std::uint32_t run =
            first ? run_cap : 3 + static_cast<std::uint32_t>(rng() % (run_cap - 2));
        first = false;
        for (std::uint32_t i = 0; i < run; ++i) {
            switch (rng() % 5) {
            case 0: w.u8(0x05); break;           // add eax,imm32
            case 1: w.u8(0x35); break;           // xor eax,imm32
            case 2: w.u8(0xA9); break;           // test eax,imm32
            case 3: w.u8(0x68); break;           // push imm32
            default: w.u8({0xC7, 0xC0}); break;  // mov eax,imm32 (C7 /0)
            }
            w.le32(benign_const(rng));
        }
        w.u8(0xC3);
        if (rng() % 2) w.u8({0x8B, 0x45, 0x08});
        if (rng() % 2) w.u8(0x90);
    }
    while (w.size() < size) w.u8(0xCC);
}

}  // namespace detail

/// Benign lookalike corpora for false-positive testing. jit-stub is the
/// fixed pair of real JIT thunk blocks; prologue emits seeded function
/// prologue/body/epilogue soup; const-heavy emits immediate-operand runs
/// capped at the default detector threshold; random is seeded uniform
/// noise. Deterministic per (kind, size, seed).
inline Region gen_benign(BenignKind kind, std::size_t size, std::uint64_t seed) {
    if (size < 16) {
        throw std::invalid_argument("gen_benign: size must be at least 16 bytes");
    }
    Region region;
    region.protection = Protection::RX;
    detail::ByteWriter w;
    switch (kind) {
    case BenignKind::JitStub:
        region.base = 0x057d0090;
        detail::emit_jit_stub(w);
        while (w.size() < size) w.u8(0xCC);
        break;
    case BenignKind::PrologueHeavy:
        region.base = 0x04a10000;
        detail::emit_prologue_heavy(w, size, seed);
        break;
    case BenignKind::ConstHeavy:
        region.base = 0x04b20000;
        detail::emit_const_heavy(w, size, seed, ScanConfig{}.max_ibadnum);
        break;
    case BenignKind::RandomBytes: {
        region.base = 0x10000000;
        std::mt19937_64 rng(seed);
        for (std::size_t i = 0; i < size; ++i) w.u8(static_cast<std::uint8_t>(rng()));
        break;
    }
    }
    region.bytes = w.take();
    return region;
}

}  // namespace jitscan
