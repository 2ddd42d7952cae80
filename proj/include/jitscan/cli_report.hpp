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
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "jitscan/config.hpp"
#include "jitscan/detector.hpp"
#include "jitscan/version.hpp"

namespace jitscan {

/// Schema tag stamped into every JSON report; bump the suffix when field
/// names or meanings change.
inline constexpr const char* kReportSchema = "jitscan-report/1";

/// One scanned input in a CLI run: where the bytes came from plus the
/// detector's report for them.
struct RegionEntry {
    std::string source;  // file path, or "<addr> via <manifest>" for traces
    DetectionReport report;

    bool operator==(const RegionEntry&) const = default;
};

struct ReportTiming {
    std::uint64_t bytes_scanned = 0;
    double seconds = 0.0;

    bool operator==(const ReportTiming&) const = default;
};

struct ReportSummary {
    std::uint32_t regions = 0;
    std::uint32_t clean = 0;
    std::uint32_t shellcode = 0;

    bool operator==(const ReportSummary&) const = default;
};

/// Top-level machine-readable output of a scan run.
struct CliReport {
    std::string version = kVersion;
    ScanConfig config;
    std::vector<RegionEntry> regions;
    ReportTiming timing;
    ReportSummary summary;

    /// Recomputes the summary from the region list; the summary always
    /// equals the per-region tally.
    void summarize() {
        summary = {};
        summary.regions = static_cast<std::uint32_t>(regions.size());
        for (const auto& entry : regions) {
            if (entry.report.verdict == Verdict::Shellcode) ++summary.shellcode;
            else ++summary.clean;
        }
    }

    bool operator==(const CliReport&) const = default;
};

namespace detail {

inline EndReason end_reason_from_string(const std::string& s) {
    if (s == "terminator") return EndReason::Terminator;
    if (s == "budget") return EndReason::Budget;
    if (s == "buffer_end") return EndReason::BufferEnd;
    throw std::invalid_argument("unknown end_reason '" + s + "'");
}

inline Verdict verdict_from_string(const std::string& s) {
    if (s == "clean") return Verdict::Clean;
    if (s == "shellcode") return Verdict::Shellcode;
    throw std::invalid_argument("unknown verdict '" + s + "'");
}

}  // namespace detail

inline void to_json(nlohmann::json& j, const ScanConfig& c) {
    j = nlohmann::json{{"max_inum", c.max_inum},
                       {"max_ibadnum", c.max_ibadnum},
                       {"count_anchor", c.count_anchor},
                       {"anchor_c7", c.anchor_c7},
                       {"chain_min_len", c.chain_min_len},
                       {"chainscan", c.chainscan}};
}

inline void from_json(const nlohmann::json& j, ScanConfig& c) {
    j.at("max_inum").get_to(c.max_inum);
    j.at("max_ibadnum").get_to(c.max_ibadnum);
    j.at("count_anchor").get_to(c.count_anchor);
    j.at("anchor_c7").get_to(c.anchor_c7);
    j.at("chain_min_len").get_to(c.chain_min_len);
    j.at("chainscan").get_to(c.chainscan);
}

inline void to_json(nlohmann::json& j, const Hit& h) {
    j = nlohmann::json{{"anchor_offset", h.anchor_offset},
                       {"num_instr", h.num_instr},
                       {"num_badinstr", h.num_badinstr},
                       {"end_reason", to_string(h.end_reason)}};
}

inline void from_json(const nlohmann::json& j, Hit& h) {
    j.at("anchor_offset").get_to(h.anchor_offset);
    j.at("num_instr").get_to(h.num_instr);
    j.at("num_badinstr").get_to(h.num_badinstr);
    h.end_reason = detail::end_reason_from_string(j.at("end_reason").get<std::string>());
}

inline void to_json(nlohmann::json& j, const JumpLink& l) {
    j = nlohmann::json{{"jump_offset", l.jump_offset},
                       {"opcode", l.opcode},
                       {"rel8", l.rel8},
                       {"target_offset", l.target_offset}};
}

inline void from_json(const nlohmann::json& j, JumpLink& l) {
    j.at("jump_offset").get_to(l.jump_offset);
    l.opcode = static_cast<std::uint8_t>(j.at("opcode").get<int>());
    l.rel8 = static_cast<std::int8_t>(j.at("rel8").get<int>());
    j.at("target_offset").get_to(l.target_offset);
}

inline void to_json(nlohmann::json& j, const JumpChain& c) {
    j = nlohmann::json{{"links", c.links}};
}

inline void from_json(const nlohmann::json& j, JumpChain& c) {
    j.at("links").get_to(c.links);
}

inline void to_json(nlohmann::json& j, const DetectionReport& r) {
    j = nlohmann::json{{"region_base", r.region_base},
                       {"hits", r.hits},
                       {"chains", r.chains},
                       {"verdict", to_string(r.verdict)}};
}

inline void from_json(const nlohmann::json& j, DetectionReport& r) {
    j.at("region_base").get_to(r.region_base);
    j.at("hits").get_to(r.hits);
    j.at("chains").get_to(r.chains);
    r.verdict = detail::verdict_from_string(j.at("verdict").get<std::string>());
}

inline void to_json(nlohmann::json& j, const RegionEntry& e) {
    j = nlohmann::json{{"source", e.source}, {"report", e.report}};
}

inline void from_json(const nlohmann::json& j, RegionEntry& e) {
    j.at("source").get_to(e.source);
    j.at("report").get_to(e.report);
}

inline void to_json(nlohmann::json& j, const ReportTiming& t) {
    j = nlohmann::json{{"bytes_scanned", t.bytes_scanned}, {"seconds", t.seconds}};
}

inline void from_json(const nlohmann::json& j, ReportTiming& t) {
    j.at("bytes_scanned").get_to(t.bytes_scanned);
    j.at("seconds").get_to(t.seconds);
}

inline void to_json(nlohmann::json& j, const ReportSummary& s) {
    j = nlohmann::json{{"regions", s.regions}, {"clean", s.clean}, {"shellcode", s.shellcode}};
}

inline void from_json(const nlohmann::json& j, ReportSummary& s) {
    j.at("regions").get_to(s.regions);
    j.at("clean").get_to(s.clean);
    j.at("shellcode").get_to(s.shellcode);
}

inline void to_json(nlohmann::json& j, const CliReport& r) {
    j = nlohmann::json{{"schema", kReportSchema},
                       {"version", r.version},
                       {"config", r.config},
                       {"regions", r.regions},
                       {"timing", r.timing},
                       {"summary", r.summary}};
}

inline void from_json(const nlohmann::json& j, CliReport& r) {
    const auto schema = j.at("schema").get<std::string>();
    if (schema != kReportSchema) {
        throw std::invalid_argument("unsupported report schema '" + schema + "'");
    }
    j.at("version").get_to(r.version);
    j.at("config").get_to(r.config);
    j.at("regions").get_to(r.regions);
    j.at("timing").get_to(r.timing);
    j.at("summary").get_to(r.summary);
}

}  // namespace jitscan
