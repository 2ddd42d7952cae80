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
#include <optional>
#include <vector>

#include "jitscan/decoder.hpp"

namespace jitscan::testing {

/// One hand-verified x86-32 encoding: the bytes, their length from an
/// opcode-map check done by hand, the class the scanner must assign, and
/// the imm32 when one is carried. Every byte shape the corpus generator
/// emits appears here, plus the JIT-stub and control-flow encodings the
/// scanner must traverse safely.
struct EncodingRow {
    const char* name;
    std::vector<std::uint8_t> bytes;
    std::uint8_t length;
    InstrClass cls;
    std::optional<std::uint32_t> imm32;
};

inline const std::vector<EncodingRow>& oracle_rows() {
    static const std::vector<EncodingRow> rows = {
        // Spray-block encodings.
        {"mov eax,imm32 nop-padded", {0xB8, 0x90, 0x90, 0x90, 0x3C}, 5,
         InstrClass::MovRegImm32, 0x3C909090u},
        {"mov edi,imm32", {0xBF, 0x04, 0x00, 0x00, 0x00}, 5, InstrClass::MovRegImm32,
         0x00000004u},
        {"xor eax,imm32 nop-padded", {0x35, 0x90, 0x90, 0x90, 0x3C}, 5, InstrClass::Imm32Op,
         0x3C909090u},
        {"xor eax,imm32 payload a", {0x35, 0x31, 0xD2, 0x58, 0x3C}, 5, InstrClass::Imm32Op,
         0x3C58D231u},
        {"xor eax,imm32 payload b", {0x35, 0x80, 0xCA, 0xFF, 0x3C}, 5, InstrClass::Imm32Op,
         0x3CFFCA80u},
        {"cvtsi2sd xmm0,eax", {0xF2, 0x0F, 0x2A, 0xC0}, 4, InstrClass::Neutral, std::nullopt},
        {"movapd xmm1,xmm0", {0x66, 0x0F, 0x28, 0xC8}, 4, InstrClass::Neutral, std::nullopt},
        {"addsd xmm1,xmm0", {0xF2, 0x0F, 0x58, 0xC8}, 4, InstrClass::Neutral, std::nullopt},
        {"mulsd xmm1,xmm0", {0xF2, 0x0F, 0x59, 0xC8}, 4, InstrClass::Neutral, std::nullopt},
        {"divsd xmm1,xmm0", {0xF2, 0x0F, 0x5E, 0xC8}, 4, InstrClass::Neutral, std::nullopt},
        // JIT-stub encodings.
        {"mov edx,[esp+0ch]", {0x8B, 0x54, 0x24, 0x0C}, 4, InstrClass::Neutral, std::nullopt},
        {"mov ecx,[edx]", {0x8B, 0x0A}, 2, InstrClass::Neutral, std::nullopt},
        {"call rel32", {0xE8, 0x7F, 0x9C, 0x6D, 0xF8}, 5, InstrClass::Terminator,
         std::nullopt},
        {"push dword [edx+0ch]", {0xFF, 0x72, 0x0C}, 3, InstrClass::Neutral, std::nullopt},
        {"ret", {0xC3}, 1, InstrClass::Terminator, std::nullopt},
        {"ret imm16", {0xC2, 0x04, 0x00}, 3, InstrClass::Terminator, std::nullopt},
        // Wider imm32 family.
        {"add eax,imm32", {0x05, 0x11, 0x22, 0x33, 0x44}, 5, InstrClass::Imm32Op,
         0x44332211u},
        {"push imm32", {0x68, 0x90, 0x90, 0x90, 0x3C}, 5, InstrClass::Imm32Op, 0x3C909090u},
        {"or eax,imm32 (81 /1)", {0x81, 0xC8, 0x44, 0x33, 0x22, 0x11}, 6, InstrClass::Imm32Op,
         0x11223344u},
        {"imul eax,ecx,imm32", {0x69, 0xC1, 0x01, 0x00, 0x00, 0x00}, 6, InstrClass::Imm32Op,
         0x00000001u},
        {"mov eax,imm32 (C7 /0)", {0xC7, 0xC0, 0x90, 0x90, 0x90, 0x3C}, 6, InstrClass::Imm32Op,
         0x3C909090u},
        {"test eax,imm32 (A9)", {0xA9, 0x01, 0x02, 0x03, 0x04}, 5, InstrClass::Imm32Op,
         0x04030201u},
        {"test eax,imm32 (F7 /0)", {0xF7, 0xC0, 0x01, 0x02, 0x03, 0x04}, 6,
         InstrClass::Imm32Op, 0x04030201u},
        {"neg eax (F7 /3, no imm)", {0xF7, 0xD8}, 2, InstrClass::Neutral, std::nullopt},
        // Control flow and traps.
        {"jmp rel8", {0xEB, 0x01}, 2, InstrClass::Terminator, std::nullopt},
        {"jnz rel8", {0x75, 0xF5}, 2, InstrClass::Terminator, std::nullopt},
        {"jz rel32", {0x0F, 0x84, 0x10, 0x00, 0x00, 0x00}, 6, InstrClass::Terminator,
         std::nullopt},
        {"jmp rel32", {0xE9, 0x00, 0x01, 0x00, 0x00}, 5, InstrClass::Terminator, std::nullopt},
        {"call [edx] (FF /2)", {0xFF, 0x12}, 2, InstrClass::Terminator, std::nullopt},
        {"jmp [eax] (FF /4)", {0xFF, 0x20}, 2, InstrClass::Terminator, std::nullopt},
        {"int3", {0xCC}, 1, InstrClass::Terminator, std::nullopt},
        {"int imm8", {0xCD, 0x80}, 2, InstrClass::Terminator, std::nullopt},
        // Operand-size prefix narrows the immediate to 16 bits.
        {"mov ax,imm16 (66 B8)", {0x66, 0xB8, 0x90, 0x90}, 4, InstrClass::Neutral,
         std::nullopt},
        {"xor ax,imm16 (66 35)", {0x66, 0x35, 0x90, 0x90}, 4, InstrClass::Neutral,
         std::nullopt},
        {"push imm16 (66 68)", {0x66, 0x68, 0x01, 0x02}, 4, InstrClass::Neutral, std::nullopt},
        // Benign-corpus palette.
        {"push ebp", {0x55}, 1, InstrClass::Neutral, std::nullopt},
        {"mov ebp,esp", {0x8B, 0xEC}, 2, InstrClass::Neutral, std::nullopt},
        {"sub esp,imm8", {0x83, 0xEC, 0x18}, 3, InstrClass::Neutral, std::nullopt},
        {"cmp eax,imm8", {0x83, 0xF8, 0x2A}, 3, InstrClass::Neutral, std::nullopt},
        {"mov eax,[ebp+8]", {0x8B, 0x45, 0x08}, 3, InstrClass::Neutral, std::nullopt},
        {"nop", {0x90}, 1, InstrClass::Neutral, std::nullopt},
    };
    return rows;
}

}  // namespace jitscan::testing
