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

#include <charconv>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jitscan/jitscan.hpp"

namespace fs = std::filesystem;
using namespace jitscan;

namespace {

constexpr int kExitClean = 0;
constexpr int kExitShellcode = 1;
constexpr int kExitError = 2;

std::string hex32(std::uint32_t v) {
    std::ostringstream os;
    os << std::hex << v;
    return os.str();
}

void add_config_flags(CLI::App* cmd, ScanConfig& config) {
    cmd->add_option("--max-inum", config.max_inum,
                    "Instruction budget per anchor walk")
        ->capture_default_str();
    cmd->add_option("--max-ibadnum", config.max_ibadnum,
                    "Immediate-heavy instruction threshold; more than this flags a hit")
        ->capture_default_str();
    cmd->add_option("--chain-min-len", config.chain_min_len,
                    "Minimum short-jump links before a chain is reported")
        ->capture_default_str();
    cmd->add_flag("--anchor-c7", config.anchor_c7,
                  "Also anchor walks on C7 /0 mov-imm32 encodings");
    cmd->add_flag("--count-anchor", config.count_anchor,
                  "Count the anchor mov itself toward the threshold");
    cmd->add_flag("--no-chainscan{false}", config.chainscan,
                  "Disable the jump-chain pass");
}

std::optional<std::vector<std::uint8_t>> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

bool write_file(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    return static_cast<bool>(out);
}

void print_region_text(std::ostream& os, const RegionEntry& entry) {
    const DetectionReport& r = entry.report;
    os << "REGION " << entry.source << " base=" << hex32(r.region_base)
       << " verdict=" << to_string(r.verdict) << " hits=" << r.hits.size()
       << " chains=" << r.chains.size() << '\n';
    for (const Hit& h : r.hits) {
        os << "  HIT anchor=+" << hex32(h.anchor_offset) << " instr=" << h.num_instr
           << " bad=" << h.num_badinstr << " end=" << to_string(h.end_reason) << '\n';
    }
    for (const JumpChain& c : r.chains) {
        os << "  CHAIN len=" << c.links.size();
        if (!c.links.empty()) os << " start=+" << hex32(c.links.front().jump_offset);
        os << '\n';
    }
}

int cmd_scan(const std::vector<std::string>& inputs, const std::string& trace_path,
             const ScanConfig& config, bool json_out) {
    CliReport cli_report;
    cli_report.config = config;

    const auto t0 = std::chrono::steady_clock::now();

    for (const auto& input : inputs) {
        auto bytes = read_file(input);
        if (!bytes) {
            std::cerr << "jitscan: cannot read input file " << input << '\n';
            return kExitError;
        }
        Region region;
        region.base = 0;
        region.bytes = std::move(*bytes);
        region.protection = Protection::RX;
        cli_report.timing.bytes_scanned += region.bytes.size();
        cli_report.regions.push_back({input, scan_region(region, config)});
    }

    if (!trace_path.empty()) {
        std::ifstream in(trace_path);
        if (!in) {
            std::cerr << "jitscan: cannot read trace manifest " << trace_path << '\n';
            return kExitError;
        }
        std::vector<ProtectionEvent> events;
        try {
            events = parse_trace(in);
        } catch (const TraceParseError& e) {
            std::cerr << "jitscan: " << trace_path << ": " << e.what() << '\n';
            return kExitError;
        }
        const fs::path root = fs::path(trace_path).parent_path();
        TraceReplayer replayer(make_file_blob_loader(root), config);
        for (const auto& ev : events) {
            std::optional<DetectionReport> report;
            try {
                report = replayer.on_protection_change(ev);
            } catch (const BlobError& e) {
                std::cerr << "jitscan: " << trace_path << ": " << e.what() << '\n';
                return kExitError;
            }
            if (report) {
                cli_report.timing.bytes_scanned += ev.size;
                cli_report.regions.push_back(
                    {hex32(ev.address) + " via " + trace_path, std::move(*report)});
            }
        }
    }

    cli_report.timing.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    cli_report.summarize();

    if (json_out) {
        std::cout << nlohmann::json(cli_report).dump(2) << '\n';
    } else {
        for (const auto& entry : cli_report.regions) print_region_text(std::cout, entry);
        std::cout << "SUMMARY regions=" << cli_report.summary.regions
                  << " clean=" << cli_report.summary.clean
                  << " shellcode=" << cli_report.summary.shellcode
                  << " bytes=" << cli_report.timing.bytes_scanned << '\n';
    }
    return cli_report.summary.shellcode > 0 ? kExitShellcode : kExitClean;
}

std::optional<std::uint32_t> parse_hex_word(const std::string& token) {
    if (token.empty() || token.size() > 8) return std::nullopt;
    std::uint32_t value = 0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value, 16);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    return value;
}

int cmd_gen(const std::string& op_name, const std::string& payload_csv,
            const std::string& payload_file, std::size_t payload_count,
            const std::string& benign_name, std::size_t size, std::uint64_t seed,
            bool jump_linked, const fs::path& out_path, const std::string& manifest_path) {
    Region region;
    std::string describe;

    try {
        if (!benign_name.empty()) {
            static const std::map<std::string, BenignKind> kinds = {
                {"jit-stub", BenignKind::JitStub},
                {"prologue", BenignKind::PrologueHeavy},
                {"const-heavy", BenignKind::ConstHeavy},
                {"random", BenignKind::RandomBytes},
            };
            auto it = kinds.find(benign_name);
            if (it == kinds.end()) {
                std::cerr << "jitscan: unknown benign kind '" << benign_name
                          << "' (jit-stub, prologue, const-heavy, random)\n";
                return kExitError;
            }
            region = gen_benign(it->second, size, seed);
            describe = std::string("benign ") + benign_name;
        } else {
            static const std::map<std::string, SprayOperator> ops = {
                {"xor", SprayOperator::Xor},
                {"add", SprayOperator::Add},
                {"mul", SprayOperator::Mul},
                {"div", SprayOperator::Div},
            };
            auto it = ops.find(op_name);
            if (it == ops.end()) {
                std::cerr << "jitscan: unknown operator '" << op_name
                          << "' (xor, add, mul, div)\n";
                return kExitError;
            }
            SprayRecipe recipe;
            recipe.op = it->second;
            recipe.jump_linked = jump_linked;
            recipe.seed = seed;

            if (!payload_csv.empty()) {
                std::istringstream ss(payload_csv);
                std::string token;
                while (std::getline(ss, token, ',')) {
                    auto word = parse_hex_word(token);
                    if (!word) {
                        std::cerr << "jitscan: bad payload word '" << token << "'\n";
                        return kExitError;
                    }
                    recipe.payload.push_back(*word);
                }
            } else if (!payload_file.empty()) {
                std::ifstream in(payload_file);
                if (!in) {
                    std::cerr << "jitscan: cannot read payload file " << payload_file << '\n';
                    return kExitError;
                }
                std::string token;
                while (in >> token) {
                    auto word = parse_hex_word(token);
                    if (!word) {
                        std::cerr << "jitscan: bad payload word '" << token << "' in "
                                  << payload_file << '\n';
                        return kExitError;
                    }
                    recipe.payload.push_back(*word);
                }
            } else if (payload_count > 0) {
                recipe.payload = random_payload(payload_count, seed, jump_linked);
            } else {
                std::cerr << "jitscan: gen needs --payload, --payload-file, or "
                             "--payload-count (or --benign)\n";
                return kExitError;
            }
            region = gen_spray(recipe);
            describe = std::string(to_string(recipe.op)) + " spray, " +
                       std::to_string(recipe.payload.size()) + " payload words" +
                       (jump_linked ? ", jump-linked" : "");
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "jitscan: " << e.what() << '\n';
        return kExitError;
    }

    if (!write_file(out_path, region.bytes)) {
        std::cerr << "jitscan: cannot write output file " << out_path.string() << '\n';
        return kExitError;
    }
    if (!manifest_path.empty()) {
        std::ofstream mf(manifest_path);
        if (!mf) {
            std::cerr << "jitscan: cannot write manifest " << manifest_path << '\n';
            return kExitError;
        }
        ProtectionEvent ev;
        ev.address = region.base;
        ev.size = static_cast<std::uint32_t>(region.bytes.size());
        ev.protection = Protection::RX;
        ev.blob = out_path.filename().string();
        write_manifest(mf, {ev});
    }
    std::cout << "wrote " << out_path.string() << ": " << region.bytes.size()
              << " bytes, base " << hex32(region.base) << ", " << describe << '\n';
    return kExitClean;
}

int cmd_bench(std::size_t size, std::uint64_t seed, bool worst_case,
              const ScanConfig& config) {
    std::vector<std::pair<std::string, Region>> corpus;
    if (worst_case) {
        // An anchor at every offset: the densest input the scanner can see.
        Region r;
        r.base = 0x20000000;
        r.bytes.assign(size, 0xB8);
        r.protection = Protection::RX;
        corpus.emplace_back("worst-case", std::move(r));
    } else {
        const std::size_t quarter = std::max<std::size_t>(size / 4, 16);
        corpus.emplace_back("random", gen_benign(BenignKind::RandomBytes, quarter, seed));
        corpus.emplace_back("prologue",
                            gen_benign(BenignKind::PrologueHeavy, quarter, seed + 1));
        corpus.emplace_back("const-heavy",
                            gen_benign(BenignKind::ConstHeavy, quarter, seed + 2));
        SprayRecipe recipe;
        recipe.op = SprayOperator::Xor;
        recipe.payload = random_payload(16, seed + 3);
        Region spray = gen_spray(recipe);
        Region tiled;
        tiled.base = spray.base;
        tiled.protection = Protection::RX;
        while (tiled.bytes.size() + spray.bytes.size() <= quarter) {
            tiled.bytes.insert(tiled.bytes.end(), spray.bytes.begin(), spray.bytes.end());
        }
        while (tiled.bytes.size() < quarter) tiled.bytes.push_back(0xCC);
        corpus.emplace_back("spray-tile", std::move(tiled));
    }

    std::uint64_t total_bytes = 0;
    std::uint64_t total_anchors = 0;
    std::uint64_t total_hits = 0;
    std::uint64_t total_chains = 0;

    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& [name, region] : corpus) {
        const DetectionReport report = scan_region(region, config);
        const std::size_t anchors = detail::collect_anchors(region.view(), config).size();
        total_bytes += region.bytes.size();
        total_anchors += anchors;
        total_hits += report.hits.size();
        total_chains += report.chains.size();
        std::cout << "CORPUS " << name << " bytes=" << region.bytes.size()
                  << " anchors=" << anchors << " hits=" << report.hits.size()
                  << " chains=" << report.chains.size()
                  << " verdict=" << to_string(report.verdict) << '\n';
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::cout << "STATS bytes=" << total_bytes << " anchors=" << total_anchors
              << " hits=" << total_hits << " chains=" << total_chains << '\n';
    const double mib = static_cast<double>(total_bytes) / (1024.0 * 1024.0);
    std::cout << "THROUGHPUT seconds=" << seconds
              << " mib_per_s=" << (seconds > 0 ? mib / seconds : 0.0) << '\n';
    return kExitClean;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"jitscan: finds sprayed shellcode hidden in x86-32 JIT output"};
    app.require_subcommand(1);

    // scan
    auto* scan = app.add_subcommand("scan", "Scan code blobs or a protection trace");
    std::vector<std::string> inputs;
    std::string trace_path;
    bool json_out = false;
    ScanConfig scan_config;
    scan->add_option("inputs", inputs, "Raw code blob files to scan");
    scan->add_option("--trace", trace_path, "Protection-trace manifest to replay");
    scan->add_flag("--json", json_out, "Emit a JSON report instead of text");
    add_config_flags(scan, scan_config);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate spray or benign test corpora");
    std::string op_name = "xor";
    std::string payload_csv;
    std::string payload_file;
    std::size_t payload_count = 0;
    std::string benign_name;
    std::size_t gen_size = 4096;
    std::uint64_t gen_seed = 0;
    bool jump_linked = false;
    std::string out_path = "out.bin";
    std::string manifest_path;
    gen->add_option("--op", op_name, "Spray operator: xor, add, mul, div")
        ->capture_default_str();
    gen->add_option("--payload", payload_csv, "Comma-separated payload words (hex)");
    gen->add_option("--payload-file", payload_file, "File of whitespace-separated hex words");
    gen->add_option("--payload-count", payload_count, "Generate this many seeded payload words");
    gen->add_flag("--jump-linked", jump_linked, "Thread a short-jump chain through the payload");
    gen->add_option("--benign", benign_name,
                    "Benign corpus kind: jit-stub, prologue, const-heavy, random");
    gen->add_option("--size", gen_size, "Benign corpus size in bytes")->capture_default_str();
    gen->add_option("--seed", gen_seed, "Deterministic generator seed")->capture_default_str();
    gen->add_option("-o,--output", out_path, "Output blob path")->capture_default_str();
    gen->add_option("--manifest", manifest_path, "Also write a one-event trace manifest");

    // bench
    auto* bench = app.add_subcommand("bench", "Benchmark scan throughput");
    std::size_t bench_size = 1 << 20;
    std::uint64_t bench_seed = 0;
    bool worst_case = false;
    ScanConfig bench_config;
    bench->add_option("--size", bench_size, "Total corpus bytes (min 4096)")
        ->check(CLI::Range(std::size_t{4096}, std::numeric_limits<std::size_t>::max()))
        ->capture_default_str();
    bench->add_option("--seed", bench_seed, "Deterministic corpus seed")->capture_default_str();
    bench->add_flag("--worst-case", worst_case, "Scan an all-anchor buffer instead");
    add_config_flags(bench, bench_config);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // --help is a successful run
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return kExitError;
    }

    if (scan->parsed()) {
        if (inputs.empty() && trace_path.empty()) {
            std::cerr << "jitscan: scan needs input files or --trace\n\n" << scan->help();
            return kExitError;
        }
        return cmd_scan(inputs, trace_path, scan_config, json_out);
    }
    if (gen->parsed()) {
        return cmd_gen(op_name, payload_csv, payload_file, payload_count, benign_name,
                       gen_size, gen_seed, jump_linked, out_path, manifest_path);
    }
    if (bench->parsed()) {
        return cmd_bench(bench_size, bench_seed, worst_case, bench_config);
    }
    std::cerr << app.help();
    return kExitError;
}
