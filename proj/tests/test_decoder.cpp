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

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "jitscan/decoder.hpp"
#include "oracle_table.hpp"

using namespace jitscan;

TEST_CASE("hand-verified encodings decode to the expected length and class",
          "[decoder]") {
    for (const auto& row : testing::oracle_rows()) {
        INFO(row.name);
        const DecodedInstr instr = decode_at(row.bytes, 0);
        CHECK(instr.length == row.length);
        CHECK(instr.cls == row.cls);
        CHECK(instr.offset == 0);
        if (row.imm32) {
            REQUIRE(instr.imm32.has_value());
            CHECK(*instr.imm32 == *row.imm32);
        } else {
            CHECK_FALSE(instr.imm32.has_value());
        }
    }
}

TEST_CASE("decoding is position-independent within a buffer", "[decoder]") {
    for (const auto& row : testing::oracle_rows()) {
        INFO(row.name);
        std::vector<std::uint8_t> buf(7, 0x90);
        buf.insert(buf.end(), row.bytes.begin(), row.bytes.end());
        buf.insert(buf.end(), 3, 0x90);
        const DecodedInstr instr = decode_at(buf, 7);
        CHECK(instr.length == row.length);
        CHECK(instr.cls == row.cls);
        CHECK(instr.offset == 7);
    }
}

TEST_CASE("mov-imm32 register number is recovered from the opcode", "[decoder]") {
    for (std::uint8_t op = 0xB8; op <= 0xBF; ++op) {
        const std::vector<std::uint8_t> bytes = {op, 0x01, 0x02, 0x03, 0x04};
        const DecodedInstr instr = decode_at(bytes, 0);
        CHECK(instr.cls == InstrClass::MovRegImm32);
        REQUIRE(instr.reg.has_value());
        CHECK(static_cast<int>(*instr.reg) == op - 0xB8);
    }
}

TEST_CASE("truncated instructions are undecodable with length 1", "[decoder]") {
    const std::vector<std::uint8_t> truncated_mov = {0xB8, 0x90, 0x90};
    DecodedInstr instr = decode_at(truncated_mov, 0);
    CHECK(instr.cls == InstrClass::Undecodable);
    CHECK(instr.length == 1);

    const std::vector<std::uint8_t> empty;
    instr = decode_at(empty, 0);
    CHECK(instr.cls == InstrClass::Undecodable);

    const std::vector<std::uint8_t> tail = {0x90};
    instr = decode_at(tail, 5);  // offset past the end
    CHECK(instr.cls == InstrClass::Undecodable);

    // A wall of prefixes overruns the 15-byte instruction cap.
    const std::vector<std::uint8_t> prefixes(20, 0x66);
    instr = decode_at(prefixes, 0);
    CHECK(instr.cls == InstrClass::Undecodable);
    CHECK(instr.length == 1);
}

TEST_CASE("decode_at is total over random bytes", "[decoder]") {
    std::mt19937_64 rng(0xDECD);
    for (int round = 0; round < 64; ++round) {
        std::vector<std::uint8_t> buf(1 + rng() % 1024);
        for (auto& b : buf) b = static_cast<std::uint8_t>(rng());
        for (std::size_t off = 0; off < buf.size(); ++off) {
            const DecodedInstr instr = decode_at(buf, off);
            REQUIRE(instr.length >= 1);
            REQUIRE(instr.length <= 15);
            if (instr.cls == InstrClass::Undecodable) {
                REQUIRE(instr.length == 1);
            } else {
                REQUIRE(static_cast<std::size_t>(instr.offset) + instr.length <= buf.size());
            }
        }
    }
}

TEST_CASE("operand-size prefix never yields an imm32 class", "[decoder]") {
    SECTION("exhaustive over the following opcode byte") {
        for (int op = 0; op < 256; ++op) {
            std::vector<std::uint8_t> buf = {0x66, static_cast<std::uint8_t>(op)};
            buf.insert(buf.end(), 12, 0x90);
            const DecodedInstr instr = decode_at(buf, 0);
            INFO("opcode " << op);
            CHECK(instr.cls != InstrClass::MovRegImm32);
            CHECK(instr.cls != InstrClass::Imm32Op);
        }
    }
    SECTION("random buffers, every decode position") {
        std::mt19937_64 rng(0x66F);
        for (int round = 0; round < 32; ++round) {
            std::vector<std::uint8_t> buf(256);
            for (auto& b : buf) b = static_cast<std::uint8_t>(rng());
            for (std::size_t off = 0; off < buf.size(); ++off) {
                const DecodedInstr instr = decode_at(buf, off);
                if (instr.cls != InstrClass::MovRegImm32 && instr.cls != InstrClass::Imm32Op) {
                    continue;
                }
                for (std::size_t p = off; detail::is_prefix(buf[p]); ++p) {
                    REQUIRE(buf[p] != 0x66);
                }
            }
        }
    }
}

TEST_CASE("anchor scan finds mov-imm32 signatures", "[decoder]") {
    const std::vector<std::uint8_t> xor_head = {0xB8, 0x90, 0x90, 0x90, 0x3C,
                                                0x35, 0x90, 0x90, 0x90, 0x3C};
    CHECK(find_mov_anchors(xor_head) == std::vector<std::uint32_t>{0});

    const std::vector<std::uint8_t> empty;
    CHECK(find_mov_anchors(empty).empty());

    const std::vector<std::uint8_t> shifted = {0x00, 0xB9, 0x11, 0x22, 0x33, 0x44, 0x00};
    CHECK(find_mov_anchors(shifted) == std::vector<std::uint32_t>{1});

    // Too close to the end: no room for the 4 immediate bytes.
    const std::vector<std::uint8_t> cramped = {0x90, 0x90, 0xBF, 0x01, 0x02};
    CHECK(find_mov_anchors(cramped).empty());
}

TEST_CASE("anchor scan equals the per-byte predicate", "[decoder]") {
    std::mt19937_64 rng(0xA2C);
    for (int round = 0; round < 200; ++round) {
        std::vector<std::uint8_t> buf(rng() % 512);
        for (auto& b : buf) b = static_cast<std::uint8_t>(rng());

        std::vector<std::uint32_t> expect;
        for (std::size_t i = 0; i < buf.size(); ++i) {
            if ((buf[i] & 0xF8) == 0xB8 && i + 5 <= buf.size()) {
                expect.push_back(static_cast<std::uint32_t>(i));
            }
        }
        REQUIRE(find_mov_anchors(buf) == expect);
    }
}
