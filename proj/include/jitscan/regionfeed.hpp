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
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "jitscan/detector.hpp"
#include "jitscan/region.hpp"

namespace jitscan {

/// One protection-change request recorded from a JIT engine. A request
/// that flips a region to RX carries a snapshot blob of the code that
/// just became executable; that is the moment the scanner runs, before
/// anything can jump into the region.
struct ProtectionEvent {
    std::uint32_t address = 0;
    std::uint32_t size = 0;
    Protection protection = Protection::NONE;
    std::string blob;  // snapshot filename; empty when the trace recorded none

    bool has_blob() const { return !blob.empty(); }
    bool operator==(const ProtectionEvent&) const = default;
};

class TraceParseError : public std::runtime_error {
public:
    TraceParseError(std::size_t line, const std::string& what)
        : std::runtime_error("trace parse error at line " + std::to_string(line) +
                             ": " + what),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class BlobError : public std::runtime_error {
public:
    BlobError(std::uint32_t address, const std::string& what)
        : std::runtime_error("region " + to_hex(address) + ": " + what),
          address_(address) {}
    std::uint32_t address() const { return address_; }

private:
    static std::string to_hex(std::uint32_t v) {
        std::ostringstream os;
        os << std::hex << v;
        return os.str();
    }
    std::uint32_t address_;
};

namespace detail {

/// Lowercase hex without 0x, at most eight digits. Anything else is a
/// malformed field, including uppercase digits and prefixes.
inline std::optional<std::uint32_t> parse_hex_u32(const std::string& token) {
    if (token.empty() || token.size() > 8) return std::nullopt;
    std::uint32_t value = 0;
    for (char c : token) {
        std::uint32_t digit;
        if (c >= '0' && c <= '9') digit = static_cast<std::uint32_t>(c - '0');
        else if (c >= 'a' && c <= 'f') digit = static_cast<std::uint32_t>(c - 'a' + 10);
        else return std::nullopt;
        value = (value << 4) | digit;
    }
    return value;
}

inline std::optional<Protection> parse_protection(const std::string& token) {
    if (token == "RWX") return Protection::RWX;
    if (token == "RX") return Protection::RX;
    if (token == "RW") return Protection::RW;
    if (token == "R") return Protection::R;
    if (token == "NONE") return Protection::NONE;
    return std::nullopt;
}

}  // namespace detail

/// Parses a protection-trace manifest: one `MEM <hex-addr> <hex-size>
/// <PROT> <blob|->` event per line, `#` comment lines and blank lines
/// ignored. Blob references stay unresolved filenames here; they are
/// loaded only when a scan needs them.
inline std::vector<ProtectionEvent> parse_trace(std::istream& in) {
    std::vector<ProtectionEvent> events;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        std::istringstream fields(line);
        std::string tag;
        if (!(fields >> tag)) continue;  // blank line
        if (tag.front() == '#') continue;
        if (tag != "MEM") {
            throw TraceParseError(line_no, "expected MEM, got '" + tag + "'");
        }
        std::string addr_tok, size_tok, prot_tok, blob_tok;
        if (!(fields >> addr_tok >> size_tok >> prot_tok >> blob_tok)) {
            throw TraceParseError(line_no, "expected MEM <addr> <size> <prot> <blob|->");
        }
        std::string extra;
        if (fields >> extra) {
            throw TraceParseError(line_no, "trailing field '" + extra + "'");
        }

        ProtectionEvent ev;
        if (auto addr = detail::parse_hex_u32(addr_tok)) {
            ev.address = *addr;
        } else {
            throw TraceParseError(line_no, "bad address '" + addr_tok + "'");
        }
        if (auto size = detail::parse_hex_u32(size_tok); size && *size >= 1) {
            ev.size = *size;
        } else {
            throw TraceParseError(line_no, "bad size '" + size_tok + "'");
        }
        if (auto prot = detail::parse_protection(prot_tok)) {
            ev.protection = *prot;
        } else {
            throw TraceParseError(line_no, "bad protection '" + prot_tok + "'");
        }
        if (blob_tok != "-") ev.blob = blob_tok;
        events.push_back(std::move(ev));
    }
    return events;
}

/// Formats an event back into its manifest line. write_manifest round-trips
/// with parse_trace.
inline std::string format_event(const ProtectionEvent& ev) {
    std::ostringstream os;
    os << "MEM " << std::hex << ev.address << ' ' << ev.size << ' '
       << to_string(ev.protection) << ' ' << (ev.has_blob() ? ev.blob : "-");
    return os.str();
}

inline void write_manifest(std::ostream& os, const std::vector<ProtectionEvent>& events) {
    for (const auto& ev : events) os << format_event(ev) << '\n';
}

/// Maps a blob reference from the manifest to its bytes. Throws on failure;
/// the replayer turns that into a BlobError naming the region.
using BlobLoader = std::function<std::vector<std::uint8_t>(const std::string&)>;

/// Loader for the on-disk layout: blobs are raw byte files next to the
/// manifest.
inline BlobLoader make_file_blob_loader(std::filesystem::path root) {
    return [root = std::move(root)](const std::string& name) {
        const std::filesystem::path path = root / name;
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw std::runtime_error("cannot open blob file " + path.string());
        }
        return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                         std::istreambuf_iterator<char>());
    };
}

/// Applies protection events in trace order and fires the scanner at the
/// trigger point: any event that makes a region executable-and-not-writable.
/// Every RX event scans, whether or not an earlier RWX for the same address
/// was captured — truncated traces are common and missing the transition
/// would miss the payload. Other events only update the table.
class TraceReplayer {
public:
    TraceReplayer(BlobLoader loader, ScanConfig config = {})
        : loader_(std::move(loader)), config_(config) {}

    std::optional<DetectionReport> on_protection_change(const ProtectionEvent& event) {
        table_[event.address] = event.protection;
        if (event.protection != Protection::RX) return std::nullopt;
        if (!event.has_blob()) {
            throw BlobError(event.address, "RX event without a snapshot blob");
        }
        std::vector<std::uint8_t> bytes;
        try {
            bytes = loader_(event.blob);
        } catch (const std::exception& e) {
            throw BlobError(event.address, e.what());
        }
        if (bytes.size() < event.size) {
            throw BlobError(event.address,
                            "blob '" + event.blob + "' is shorter than the region");
        }
        bytes.resize(event.size);  // the event defines the region extent

        Region region;
        region.base = event.address;
        region.bytes = std::move(bytes);
        region.protection = Protection::RX;
        return scan_region(region, config_);
    }

    const std::unordered_map<std::uint32_t, Protection>& table() const { return table_; }

private:
    BlobLoader loader_;
    ScanConfig config_;
    std::unordered_map<std::uint32_t, Protection> table_;
};

/// Replays a whole trace and collects the reports in event order.
inline std::vector<DetectionReport> replay_trace(const std::vector<ProtectionEvent>& events,
                                                 const BlobLoader& loader,
                                                 const ScanConfig& config = {}) {
    TraceReplayer replayer(loader, config);
    std::vector<DetectionReport> reports;
    for (const auto& ev : events) {
        if (auto report = replayer.on_protection_change(ev)) {
            reports.push_back(std::move(*report));
        }
    }
    return reports;
}

}  // namespace jitscan
