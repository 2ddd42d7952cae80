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

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "jitscan/regionfeed.hpp"
#include "jitscan/spraygen.hpp"

using namespace jitscan;
namespace fs = std::filesystem;

namespace {

// In-memory blob store standing in for files beside a manifest.
BlobLoader loader_of(std::map<std::string, std::vector<std::uint8_t>> blobs) {
    return [blobs = std::move(blobs)](const std::string& name) {
        auto it = blobs.find(name);
        if (it == blobs.end()) throw std::runtime_error("no blob named " + name);
        return it->second;
    };
}

const std::vector<std::uint8_t> kStubBlock = {0x8B, 0x54, 0x24, 0x0C, 0x8B, 0x0A,
                                              0xE8, 0x7F, 0x9C, 0x6D, 0xF8, 0xC3};

}  // namespace

TEST_CASE("manifest lines parse into protection events", "[regionfeed]") {
    std::istringstream in("MEM 057d0090 1 RWX -\n"
                          "MEM 057d0090 c RX blk0.bin\n");
    const auto events = parse_trace(in);
    REQUIRE(events.size() == 2);

    CHECK(events[0].address == 0x057d0090);
    CHECK(events[0].size == 1);
    CHECK(events[0].protection == Protection::RWX);
    CHECK_FALSE(events[0].has_blob());

    CHECK(events[1].address == 0x057d0090);
    CHECK(events[1].size == 12);
    CHECK(events[1].protection == Protection::RX);
    CHECK(events[1].blob == "blk0.bin");
}

TEST_CASE("empty manifests, comments, and blank lines are fine", "[regionfeed]") {
    std::istringstream empty("");
    CHECK(parse_trace(empty).empty());

    std::istringstream commented("# protection trace\n"
                                 "\n"
                                 "   \n"
                                 "# MEM 1000 10 RX ignored.bin\n"
                                 "MEM 2000 20 RW -\r\n");
    const auto events = parse_trace(commented);
    REQUIRE(events.size() == 1);
    CHECK(events[0].address == 0x2000);
    CHECK(events[0].size == 0x20);
    CHECK(events[0].protection == Protection::RW);
}

TEST_CASE("malformed manifest lines name their line number", "[regionfeed]") {
    const struct {
        const char* text;
        std::size_t bad_line;
    } cases[] = {
        {"BOGUS 1000 10 RX a.bin\n", 1},
        {"MEM 1000 10 RX\n", 1},                              // missing blob field
        {"MEM 1000 10 RX a.bin extra\n", 1},                  // trailing field
        {"MEM 0x1000 10 RX a.bin\n", 1},                      // 0x prefix rejected
        {"MEM 1AB0 10 RX a.bin\n", 1},                        // uppercase hex rejected
        {"MEM 1000 0 RX a.bin\n", 1},                         // zero size
        {"MEM 1000 10 rx a.bin\n", 1},                        // lowercase protection
        {"MEM 1000 10 RX a.bin\nMEM zz 10 RX b.bin\n", 2},    // bad hex, later line
        {"# ok\nMEM 1000 10 RX a.bin\nMEM 1000 10 XYZ -\n", 3},
    };
    for (const auto& c : cases) {
        INFO(c.text);
        std::istringstream in(c.text);
        try {
            parse_trace(in);
            FAIL("expected TraceParseError");
        } catch (const TraceParseError& e) {
            CHECK(e.line() == c.bad_line);
        }
    }
}

TEST_CASE("manifest formatting round-trips", "[regionfeed]") {
    std::vector<ProtectionEvent> events;
    events.push_back({0x057d0090, 1, Protection::RWX, ""});
    events.push_back({0x057d0090, 0xc, Protection::RX, "blk0.bin"});
    events.push_back({0xdeadbeef, 0x10000, Protection::NONE, ""});

    std::ostringstream out;
    write_manifest(out, events);
    CHECK(out.str() == "MEM 57d0090 1 RWX -\n"
                       "MEM 57d0090 c RX blk0.bin\n"
                       "MEM deadbeef 10000 NONE -\n");

    std::istringstream in(out.str());
    CHECK(parse_trace(in) == events);
}

TEST_CASE("the RWX→RX pair triggers exactly one clean scan", "[regionfeed]") {
    TraceReplayer replayer(loader_of({{"blk0.bin", kStubBlock}}));

    auto first = replayer.on_protection_change({0x057d0090, 1, Protection::RWX, ""});
    CHECK_FALSE(first.has_value());

    auto second = replayer.on_protection_change(
        {0x057d0090, 12, Protection::RX, "blk0.bin"});
    REQUIRE(second.has_value());
    CHECK(second->region_base == 0x057d0090);
    CHECK(second->verdict == Verdict::Clean);
    CHECK(second->hits.empty());
}

TEST_CASE("an RX snapshot of spray code is flagged", "[regionfeed]") {
    SprayRecipe recipe;
    recipe.op = SprayOperator::Xor;
    recipe.payload = random_payload(16, 4);
    const Region spray = gen_spray(recipe);

    TraceReplayer replayer(loader_of({{"spray.bin", spray.bytes}}));
    const auto report = replayer.on_protection_change(
        {0x0a000000, static_cast<std::uint32_t>(spray.bytes.size()), Protection::RX,
         "spray.bin"});
    REQUIRE(report.has_value());
    CHECK(report->verdict == Verdict::Shellcode);
    CHECK(report->region_base == 0x0a000000);
}

TEST_CASE("non-executable events only update state", "[regionfeed]") {
    TraceReplayer replayer(loader_of({}));
    CHECK_FALSE(replayer.on_protection_change({0x1000, 16, Protection::RW, ""}).has_value());
    CHECK_FALSE(replayer.on_protection_change({0x2000, 16, Protection::RWX, ""}).has_value());
    CHECK_FALSE(replayer.on_protection_change({0x3000, 16, Protection::R, ""}).has_value());
    CHECK_FALSE(replayer.on_protection_change({0x4000, 16, Protection::NONE, ""}).has_value());

    REQUIRE(replayer.table().size() == 4);
    CHECK(replayer.table().at(0x1000) == Protection::RW);
    CHECK(replayer.table().at(0x2000) == Protection::RWX);
}

TEST_CASE("an RX event scans even without a recorded RWX before it", "[regionfeed]") {
    TraceReplayer replayer(loader_of({{"b.bin", kStubBlock}}));
    const auto report =
        replayer.on_protection_change({0x5000, 12, Protection::RX, "b.bin"});
    REQUIRE(report.has_value());
    CHECK(report->verdict == Verdict::Clean);
}

TEST_CASE("blob problems raise errors naming the region", "[regionfeed]") {
    TraceReplayer replayer(loader_of({{"short.bin", {0x90, 0x90}}}));

    SECTION("RX without a blob reference") {
        try {
            replayer.on_protection_change({0xabc0, 16, Protection::RX, ""});
            FAIL("expected BlobError");
        } catch (const BlobError& e) {
            CHECK(e.address() == 0xabc0);
        }
    }
    SECTION("unknown blob name") {
        CHECK_THROWS_AS(
            replayer.on_protection_change({0xabc0, 16, Protection::RX, "missing.bin"}),
            BlobError);
    }
    SECTION("blob shorter than the region") {
        CHECK_THROWS_AS(
            replayer.on_protection_change({0xabc0, 16, Protection::RX, "short.bin"}),
            BlobError);
    }
}

TEST_CASE("the event size bounds the scanned extent", "[regionfeed]") {
    // Blob holds the benign block followed by hot spray bytes; the event
    // only covers the benign prefix, so nothing past it may be scanned.
    SprayRecipe recipe;
    recipe.op = SprayOperator::Xor;
    recipe.payload = random_payload(16, 8);
    std::vector<std::uint8_t> blob = kStubBlock;
    const Region spray = gen_spray(recipe);
    blob.insert(blob.end(), spray.bytes.begin(), spray.bytes.end());

    TraceReplayer replayer(loader_of({{"mix.bin", blob}}));
    const auto report = replayer.on_protection_change(
        {0x6000, static_cast<std::uint32_t>(kStubBlock.size()), Protection::RX, "mix.bin"});
    REQUIRE(report.has_value());
    CHECK(report->verdict == Verdict::Clean);
}

TEST_CASE("replaying a trace is deterministic and scans once per RX", "[regionfeed]") {
    SprayRecipe recipe;
    recipe.op = SprayOperator::Xor;
    recipe.payload = random_payload(12, 21);
    const Region spray = gen_spray(recipe);

    std::vector<ProtectionEvent> events = {
        {0x1000, 1, Protection::RWX, ""},
        {0x1000, 12, Protection::RX, "clean.bin"},
        {0x2000, 4, Protection::RW, ""},
        {0x3000, static_cast<std::uint32_t>(spray.bytes.size()), Protection::RX,
         "spray.bin"},
        {0x1000, 12, Protection::RW, ""},
    };
    const auto loader =
        loader_of({{"clean.bin", kStubBlock}, {"spray.bin", spray.bytes}});

    const auto reports_a = replay_trace(events, loader);
    const auto reports_b = replay_trace(events, loader);

    REQUIRE(reports_a.size() == 2);  // one report per RX event
    CHECK(reports_a[0].verdict == Verdict::Clean);
    CHECK(reports_a[1].verdict == Verdict::Shellcode);
    CHECK(reports_a == reports_b);
}

TEST_CASE("the file loader reads blobs beside the manifest", "[regionfeed]") {
    const fs::path dir =
        fs::temp_directory_path() / ("jitscan_feed_" + std::to_string(::getpid()));
    fs::create_directories(dir);

    {
        std::ofstream blob(dir / "blk0.bin", std::ios::binary);
        blob.write(reinterpret_cast<const char*>(kStubBlock.data()),
                   static_cast<std::streamsize>(kStubBlock.size()));
    }
    {
        std::ofstream manifest(dir / "trace.txt");
        manifest << "MEM 057d0090 1 RWX -\n"
                 << "MEM 057d0090 c RX blk0.bin\n";
    }

    std::ifstream manifest(dir / "trace.txt");
    const auto events = parse_trace(manifest);
    const auto reports = replay_trace(events, make_file_blob_loader(dir));
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].verdict == Verdict::Clean);
    CHECK(reports[0].region_base == 0x057d0090);

    CHECK_THROWS_AS(make_file_blob_loader(dir)("absent.bin"), std::runtime_error);

    fs::remove_all(dir);
}
