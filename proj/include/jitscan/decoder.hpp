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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace jitscan {

/// What the scanner needs to know about one instruction: is it a
/// `mov reg,imm32` block head, does it consume a 32-bit immediate,
/// does it end straight-line execution, or neither.
enum class InstrClass : std::uint8_t {
    MovRegImm32,  ///< B8+rd with a 4-byte immediate (candidate block head)
    Imm32Op,      ///< any other instruction with a 32-bit immediate source
    Terminator,   ///< ret/call/jmp/jcc/trap: ends a straight-line block
    Neutral,      ///< decodes fine, none of the above
    Undecodable,  ///< would overrun the buffer or exceed 15 bytes
};

/// x86-32 general purpose register, numbered as in the +rd opcode encoding.
enum class Reg : std::uint8_t { EAX, ECX, EDX, EBX, ESP, EBP, ESI, EDI };

struct DecodedInstr {
    std::uint32_t offset = 0;
    std::uint8_t length = 1;  // 1..15; Undecodable always reports 1
    InstrClass cls = InstrClass::Undecodable;
    std::optional<std::uint32_t> imm32;  // present iff MovRegImm32 or Imm32Op
    std::optional<Reg> reg;              // present iff MovRegImm32
};

namespace detail {

// Legacy prefixes. 66/67 change operand/address size and matter for
// immediate and displacement widths; the rest only consume a byte.
constexpr bool is_prefix(std::uint8_t b) {
    switch (b) {
    case 0xF0: case 0xF2: case 0xF3:              // lock / repne / rep
    case 0x2E: case 0x36: case 0x3E:              // cs / ss / ds
    case 0x26: case 0x64: case 0x65:              // es / fs / gs
    case 0x66: case 0x67:                         // operand / address size
        return true;
    default:
        return false;
    }
}

enum class ImmKind : std::uint8_t {
    None,
    Imm8,
    Imm16,      // always 16 bits (ret imm16)
    ImmZ,       // 32 bits, or 16 under a 66 prefix
    Imm16And8,  // enter imm16,imm8
    Ptr16Z,     // far pointer: 16-bit selector + Z-sized offset
    Moffs,      // direct address, 67 prefix shrinks it to 16 bits
    Grp3Imm8,   // F6: imm8 present iff modrm reg field is 0 or 1
    Grp3ImmZ,   // F7: immZ present iff modrm reg field is 0 or 1
};

struct OpInfo {
    bool modrm = false;
    ImmKind imm = ImmKind::None;
};

consteval std::array<OpInfo, 256> one_byte_table() {
    std::array<OpInfo, 256> t{};
    auto m = [&](std::uint8_t op) { t[op].modrm = true; };
    auto i = [&](std::uint8_t op, ImmKind k) { t[op].imm = k; };

    // ALU blocks 00..3F: <op> r/m,r and r,r/m take modrm; the +4 form is
    // al,imm8 and the +5 form is eax,immZ.
    for (std::uint8_t base = 0x00; base <= 0x38; base += 0x08) {
        m(base + 0); m(base + 1); m(base + 2); m(base + 3);
        i(base + 4, ImmKind::Imm8);
        i(base + 5, ImmKind::ImmZ);
    }
    m(0x62); m(0x63);                      // bound / arpl
    i(0x68, ImmKind::ImmZ);                // push imm32
    m(0x69); i(0x69, ImmKind::ImmZ);       // imul r,r/m,imm32
    i(0x6A, ImmKind::Imm8);                // push imm8
    m(0x6B); i(0x6B, ImmKind::Imm8);       // imul r,r/m,imm8
    for (std::uint8_t op = 0x70; op <= 0x7F; ++op) i(op, ImmKind::Imm8);  // jcc rel8
    m(0x80); i(0x80, ImmKind::Imm8);       // grp1 r/m8,imm8
    m(0x81); i(0x81, ImmKind::ImmZ);       // grp1 r/m32,imm32
    m(0x82); i(0x82, ImmKind::Imm8);       // grp1 alias
    m(0x83); i(0x83, ImmKind::Imm8);       // grp1 r/m32,imm8
    m(0x84); m(0x85); m(0x86); m(0x87);    // test / xchg
    m(0x88); m(0x89); m(0x8A); m(0x8B);    // mov
    m(0x8C); m(0x8D); m(0x8E); m(0x8F);    // mov sreg / lea / pop r/m
    i(0x9A, ImmKind::Ptr16Z);              // call far
    i(0xA0, ImmKind::Moffs); i(0xA1, ImmKind::Moffs);
    i(0xA2, ImmKind::Moffs); i(0xA3, ImmKind::Moffs);
    i(0xA8, ImmKind::Imm8);                // test al,imm8
    i(0xA9, ImmKind::ImmZ);                // test eax,imm32
    for (std::uint8_t op = 0xB0; op <= 0xB7; ++op) i(op, ImmKind::Imm8);  // mov r8,imm8
    for (std::uint8_t op = 0xB8; op <= 0xBF; ++op) i(op, ImmKind::ImmZ);  // mov r32,imm32
    m(0xC0); i(0xC0, ImmKind::Imm8);       // shift grp2 r/m8,imm8
    m(0xC1); i(0xC1, ImmKind::Imm8);       // shift grp2 r/m32,imm8
    i(0xC2, ImmKind::Imm16);               // ret imm16
    m(0xC4); m(0xC5);                      // les / lds
    m(0xC6); i(0xC6, ImmKind::Imm8);       // mov r/m8,imm8
    m(0xC7); i(0xC7, ImmKind::ImmZ);       // mov r/m32,imm32
    i(0xC8, ImmKind::Imm16And8);           // enter
    i(0xCA, ImmKind::Imm16);               // retf imm16
    i(0xCD, ImmKind::Imm8);                // int imm8
    for (std::uint8_t op = 0xD0; op <= 0xD3; ++op) m(op);  // shift grp2
    i(0xD4, ImmKind::Imm8); i(0xD5, ImmKind::Imm8);        // aam / aad
    for (std::uint8_t op = 0xD8; op <= 0xDF; ++op) m(op);  // x87
    for (std::uint8_t op = 0xE0; op <= 0xE7; ++op) i(op, ImmKind::Imm8);  // loop/jcxz/in/out
    i(0xE8, ImmKind::ImmZ);                // call rel32
    i(0xE9, ImmKind::ImmZ);                // jmp rel32
    i(0xEA, ImmKind::Ptr16Z);              // jmp far
    i(0xEB, ImmKind::Imm8);                // jmp rel8
    m(0xF6); i(0xF6, ImmKind::Grp3Imm8);   // grp3 r/m8
    m(0xF7); i(0xF7, ImmKind::Grp3ImmZ);   // grp3 r/m32
    m(0xFE); m(0xFF);                      // grp4 / grp5
    return t;
}

consteval std::array<OpInfo, 256> two_byte_table() {
    // Nearly every 0F xx opcode takes a modrm byte; list the exceptions.
    std::array<OpInfo, 256> t{};
    for (auto& e : t) e.modrm = true;
    constexpr std::uint8_t no_modrm[] = {
        0x05, 0x06, 0x07, 0x08, 0x09, 0x0B, 0x0E,              // syscall..ud2/femms
        0x30, 0x31, 0x32, 0x33, 0x34, 0x35, 0x37,              // msr/tsc/sysenter
        0x77,                                                  // emms
        0xA0, 0xA1, 0xA2, 0xA8, 0xA9, 0xAA,                    // push/pop seg, cpuid, rsm
        0xC8, 0xC9, 0xCA, 0xCB, 0xCC, 0xCD, 0xCE, 0xCF,        // bswap
    };
    for (auto op : no_modrm) t[op].modrm = false;
    for (std::uint8_t op = 0x80; op <= 0x8F; ++op) {  // jcc rel32
        t[op].modrm = false;
        t[op].imm = ImmKind::ImmZ;
    }
    constexpr std::uint8_t modrm_imm8[] = {
        0x0F,                     // 3DNow! (suffix byte doubles as imm8)
        0x70, 0x71, 0x72, 0x73,   // pshuf / shift groups
        0xA4, 0xAC,               // shld / shrd imm8
        0xBA,                     // bt group imm8
        0xC2, 0xC4, 0xC5, 0xC6,   // cmpps / pinsrw / pextrw / shufps
    };
    for (auto op : modrm_imm8) t[op].imm = ImmKind::Imm8;
    return t;
}

inline constexpr std::array<OpInfo, 256> kOneByte = one_byte_table();
inline constexpr std::array<OpInfo, 256> kTwoByte = two_byte_table();

inline std::uint32_t read_le32(std::span<const std::uint8_t> bytes, std::size_t at) {
    return static_cast<std::uint32_t>(bytes[at]) |
           static_cast<std::uint32_t>(bytes[at + 1]) << 8 |
           static_cast<std::uint32_t>(bytes[at + 2]) << 16 |
           static_cast<std::uint32_t>(bytes[at + 3]) << 24;
}

}  // namespace detail

/// Decodes the instruction starting at `offset`. Total: hostile bytes never
/// abort the scan, they come back as Undecodable (length 1) instead. The
/// decoder knows the exact semantics of the block-head, immediate-operand
/// and terminator families; everything else gets a best-effort length from
/// a generic prefix/modrm/sib walk and is classified Neutral.
inline DecodedInstr decode_at(std::span<const std::uint8_t> bytes, std::size_t offset) {
    using namespace detail;

    DecodedInstr out;
    out.offset = static_cast<std::uint32_t>(offset);
    out.length = 1;
    out.cls = InstrClass::Undecodable;

    const std::size_t size = bytes.size();
    if (offset >= size) return out;

    std::size_t pos = offset;
    bool pfx66 = false;
    bool pfx67 = false;
    while (pos < size && is_prefix(bytes[pos])) {
        if (bytes[pos] == 0x66) pfx66 = true;
        if (bytes[pos] == 0x67) pfx67 = true;
        ++pos;
        if (pos - offset >= 15) return out;  // prefix runaway
    }
    if (pos >= size) return out;

    const std::uint8_t op1 = bytes[pos++];
    bool two_byte = false;
    std::uint8_t op2 = 0;
    OpInfo info;
    if (op1 == 0x0F) {
        if (pos >= size) return out;
        two_byte = true;
        op2 = bytes[pos++];
        info = kTwoByte[op2];
        if (op2 == 0x38 || op2 == 0x3A) {  // three-byte escapes
            if (pos >= size) return out;
            ++pos;  // third opcode byte
            info.modrm = true;
            info.imm = (op2 == 0x3A) ? ImmKind::Imm8 : ImmKind::None;
        }
    } else {
        info = kOneByte[op1];
    }

    std::uint8_t modrm_reg = 0;
    if (info.modrm) {
        if (pos >= size) return out;
        const std::uint8_t modrm = bytes[pos++];
        const std::uint8_t mod = modrm >> 6;
        const std::uint8_t rm = modrm & 7;
        modrm_reg = (modrm >> 3) & 7;
        std::size_t disp = 0;
        if (mod != 3) {
            if (pfx67) {  // 16-bit addressing: no sib, disp16 forms
                if (mod == 0) disp = (rm == 6) ? 2 : 0;
                else if (mod == 1) disp = 1;
                else disp = 2;
            } else {
                bool sib = (rm == 4);
                std::uint8_t sib_base = 0;
                if (sib) {
                    if (pos >= size) return out;
                    sib_base = bytes[pos++] & 7;
                }
                if (mod == 0) disp = (rm == 5 || (sib && sib_base == 5)) ? 4 : 0;
                else if (mod == 1) disp = 1;
                else disp = 4;
            }
        }
        pos += disp;
    }

    std::size_t imm = 0;
    switch (info.imm) {
    case ImmKind::None: break;
    case ImmKind::Imm8: imm = 1; break;
    case ImmKind::Imm16: imm = 2; break;
    case ImmKind::ImmZ: imm = pfx66 ? 2 : 4; break;
    case ImmKind::Imm16And8: imm = 3; break;
    case ImmKind::Ptr16Z: imm = 2 + (pfx66 ? 2u : 4u); break;
    case ImmKind::Moffs: imm = pfx67 ? 2 : 4; break;
    case ImmKind::Grp3Imm8: imm = (modrm_reg <= 1) ? 1 : 0; break;
    case ImmKind::Grp3ImmZ: imm = (modrm_reg <= 1) ? (pfx66 ? 2 : 4) : 0; break;
    }
    pos += imm;

    const std::size_t length = pos - offset;
    if (length > 15 || offset + length > size) return out;

    // Classification. Terminators win even when they carry an immediate
    // (call/jmp rel32) and regardless of a 66 prefix.
    InstrClass cls = InstrClass::Neutral;
    if (two_byte) {
        if (op2 >= 0x80 && op2 <= 0x8F) cls = InstrClass::Terminator;
    } else {
        switch (op1) {
        case 0xC3: case 0xC2: case 0xE8: case 0xE9: case 0xEB:
        case 0xCC: case 0xCD:
            cls = InstrClass::Terminator;
            break;
        case 0xFF:
            if (modrm_reg >= 2 && modrm_reg <= 5) cls = InstrClass::Terminator;
            break;
        default:
            if (op1 >= 0x70 && op1 <= 0x7F) cls = InstrClass::Terminator;
            break;
        }
        if (cls == InstrClass::Neutral && !pfx66) {
            if (op1 >= 0xB8 && op1 <= 0xBF) {
                cls = InstrClass::MovRegImm32;
            } else {
                switch (op1) {
                case 0x05: case 0x0D: case 0x15: case 0x1D:
                case 0x25: case 0x2D: case 0x35: case 0x3D:  // alu eax,imm32
                case 0x68:                                   // push imm32
                case 0x69:                                   // imul imm32
                case 0x81:                                   // alu r/m32,imm32
                case 0xA9:                                   // test eax,imm32
                    cls = InstrClass::Imm32Op;
                    break;
                case 0xC7:                                   // mov r/m32,imm32
                case 0xF7:                                   // test r/m32,imm32
                    if (modrm_reg == 0) cls = InstrClass::Imm32Op;
                    break;
                default:
                    break;
                }
            }
        }
    }

    out.length = static_cast<std::uint8_t>(length);
    out.cls = cls;
    if (cls == InstrClass::MovRegImm32 || cls == InstrClass::Imm32Op) {
        out.imm32 = read_le32(bytes, offset + length - 4);
    }
    if (cls == InstrClass::MovRegImm32) {
        out.reg = static_cast<Reg>(op1 & 7);
    }
    return out;
}

/// Byte-aligned signature scan for `mov reg,imm32` heads: every offset whose
/// byte is in B8..BF with room for the 4-byte immediate, at any alignment.
inline std::vector<std::uint32_t> find_mov_anchors(std::span<const std::uint8_t> bytes) {
    std::vector<std::uint32_t> anchors;
    if (bytes.size() < 5) return anchors;
    for (std::size_t i = 0; i + 5 <= bytes.size(); ++i) {
        if ((bytes[i] & 0xF8) == 0xB8) anchors.push_back(static_cast<std::uint32_t>(i));
    }
    return anchors;
}

}  // namespace jitscan
