// jasm: assemble, inspect and benchmark jump-only x86 programs.
//
// Exit codes: 0 success, 1 usage/IO, 2 parse error, 3 semantic or range
// error, 4 comparison mismatch.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jasm/jasm.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitSemantic = 3;
constexpr int kExitMismatch = 4;

struct LoadedProgram {
    jasm::SourceProgram program;
    int exit_code = kExitOk;  // non-zero when loading failed
};

LoadedProgram load_program(const std::string& path, const std::string& mode_override) {
    LoadedProgram out;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "jasm: cannot open '" << path << "'\n";
        out.exit_code = kExitUsage;
        return out;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();

    jasm::ParseResult parsed = jasm::parse(buffer.str());
    if (!parsed.ok()) {
        for (const jasm::ParseError& e : parsed.errors)
            std::cerr << path << ":" << e.line << ":" << e.column << ": " << e.message << "\n";
        out.exit_code = kExitParse;
        return out;
    }
    out.program = std::move(parsed.program);

    if (!mode_override.empty()) {
        if (mode_override == "16")
            out.program.mode = jasm::Mode::Bits16;
        else if (mode_override == "32")
            out.program.mode = jasm::Mode::Bits32;
        else
            out.program.mode = jasm::Mode::Bits64;
    }

    auto issues = jasm::validate(out.program);
    if (!issues.empty()) {
        for (const jasm::SemanticError& e : issues) {
            const char* what = e.kind == jasm::SemanticError::Kind::DuplicateLabel
                                   ? "duplicate label"
                                   : "undefined target";
            std::cerr << path << ": item " << e.item_index << ": " << what << " '" << e.name << "'\n";
        }
        out.exit_code = kExitSemantic;
    }
    return out;
}

jasm::SizeAssignment assignment_for(const jasm::SourceProgram& program, const std::string& algo) {
    if (algo == "iterative")
        return jasm::iterative_fixpoint(program).assignment;
    jasm::AllShortLayout layout = jasm::layout_all_short(program);
    return jasm::relax(layout.jumps).assignment;
}

bool write_file(const std::string& path, const void* data, size_t size) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        return false;
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    return static_cast<bool>(out);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> parts;
    std::string current;
    for (char c : value) {
        if (c == ';' || c == ',') {
            if (!current.empty())
                parts.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    if (!current.empty())
        parts.push_back(current);
    return parts;
}

int run_asm(const std::string& input, const std::string& out_path,
            const std::string& listing_path, const std::string& algo,
            const std::string& mode_override) {
    LoadedProgram loaded = load_program(input, mode_override);
    if (loaded.exit_code != kExitOk)
        return loaded.exit_code;

    try {
        jasm::SizeAssignment assignment = assignment_for(loaded.program, algo);
        jasm::EncodedProgram encoded = jasm::encode(loaded.program, assignment);

        jasm::VerifyReport verify = jasm::decode_verify(encoded, loaded.program, assignment);
        if (!verify.ok) {
            std::cerr << "jasm: internal decode-verify mismatch: " << verify.message << "\n";
            return kExitSemantic;
        }

        if (!write_file(out_path, encoded.bytes.data(), encoded.bytes.size())) {
            std::cerr << "jasm: cannot write '" << out_path << "'\n";
            return kExitUsage;
        }
        if (!listing_path.empty()) {
            std::string listing = jasm::render_listing(encoded);
            if (!write_file(listing_path, listing.data(), listing.size())) {
                std::cerr << "jasm: cannot write '" << listing_path << "'\n";
                return kExitUsage;
            }
        }
        return kExitOk;
    } catch (const jasm::EncodeError& e) {
        std::cerr << "jasm: " << e.what() << "\n";
        return kExitSemantic;
    }
}

int run_explain(const std::string& input, const std::string& mode_override) {
    LoadedProgram loaded = load_program(input, mode_override);
    if (loaded.exit_code != kExitOk)
        return loaded.exit_code;

    try {
        jasm::AllShortLayout layout = jasm::layout_all_short(loaded.program);
        jasm::RelaxationResult result = jasm::relax(layout.jumps);
        jasm::FinalLayout final = jasm::final_layout(loaded.program, result.assignment);

        std::vector<int64_t> final_disp;
        size_t ordinal = 0;
        for (const jasm::Item& item : loaded.program.items) {
            if (const jasm::Jump* j = std::get_if<jasm::Jump>(&item)) {
                final_disp.push_back(final.labels.at(j->target) -
                                     (final.jump_offsets[ordinal] + final.jump_sizes[ordinal]));
                ++ordinal;
            }
        }

        std::printf("%5s  %10s  %10s  %10s  %-5s  %6s  %10s  %10s\n", "idx", "start",
                    "origDist", "finalDist", "size", "longSz", "finalOff", "finalDisp");
        for (size_t k = 0; k < layout.jumps.records.size(); ++k) {
            const jasm::JumpRecord& rec = layout.jumps.records[k];
            std::printf("%5zu  %10lld  %10lld  %10lld  %-5s  %6lld  %10lld  %10lld\n", k,
                        static_cast<long long>(rec.all_short_start),
                        static_cast<long long>(rec.original_distance),
                        static_cast<long long>(result.final_distances[k]),
                        result.assignment.is_long[k] ? "long" : "short",
                        static_cast<long long>(rec.long_size),
                        static_cast<long long>(final.jump_offsets[k]),
                        static_cast<long long>(final_disp[k]));
        }
        return kExitOk;
    } catch (const jasm::EncodeError& e) {
        std::cerr << "jasm: " << e.what() << "\n";
        return kExitSemantic;
    }
}

int run_compare(const std::string& input, const std::string& mode_override,
                std::optional<size_t> perturb) {
    LoadedProgram loaded = load_program(input, mode_override);
    if (loaded.exit_code != kExitOk)
        return loaded.exit_code;

    try {
        jasm::AllShortLayout layout = jasm::layout_all_short(loaded.program);
        jasm::SizeAssignment linear = jasm::relax(layout.jumps).assignment;
        if (perturb && !linear.is_long.empty()) {
            size_t at = *perturb % linear.is_long.size();
            linear.is_long[at] = !linear.is_long[at];
        }

        jasm::SizeAssignment iterative = jasm::iterative_fixpoint(loaded.program).assignment;

        std::optional<jasm::SizeAssignment> brute;
        const size_t n = loaded.program.jump_count();
        if (n <= 12)
            brute = jasm::brute_force_minimal(loaded.program).assignment;

        bool match = linear == iterative && (!brute || *brute == linear);
        if (match) {
            std::printf("%d algorithms agreed on %zu jumps\n", brute ? 3 : 2, n);
            return kExitOk;
        }

        std::printf("assignment mismatch:\n");
        std::printf("%5s  %-8s  %-9s  %-8s\n", "idx", "linear", "iterative", "brute");
        for (size_t k = 0; k < n; ++k) {
            const char* b = brute ? ((*brute).is_long[k] ? "long" : "short") : "-";
            if (linear.is_long[k] != iterative.is_long[k] ||
                (brute && (*brute).is_long[k] != linear.is_long[k]))
                std::printf("%5zu  %-8s  %-9s  %-8s\n", k, linear.is_long[k] ? "long" : "short",
                            iterative.is_long[k] ? "long" : "short", b);
        }
        return kExitMismatch;
    } catch (const jasm::EncodeError& e) {
        std::cerr << "jasm: " << e.what() << "\n";
        return kExitSemantic;
    }
}

int run_gen(const std::string& kind, size_t jumps, uint64_t seed,
            const std::string& out_path, const std::string& mode_str) {
    jasm::Mode mode = mode_str == "16"   ? jasm::Mode::Bits16
                      : mode_str == "64" ? jasm::Mode::Bits64
                                         : jasm::Mode::Bits32;
    jasm::SourceProgram program;
    if (kind == "paper") {
        program = jasm::gen_paper_mutual();
    } else if (kind == "cascade") {
        if (jumps < 1) {
            std::cerr << "jasm: cascade needs --jumps >= 1\n";
            return kExitUsage;
        }
        program = jasm::gen_cascade(jumps, mode);
    } else {
        jasm::GenParams params;
        params.seed = seed;
        params.jump_count = jumps;
        params.mode = mode;
        program = jasm::gen_random(params);
    }

    std::string text = jasm::format(program);
    if (out_path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return kExitOk;
    }
    if (!write_file(out_path, text.data(), text.size())) {
        std::cerr << "jasm: cannot write '" << out_path << "'\n";
        return kExitUsage;
    }
    return kExitOk;
}

struct BenchRow {
    std::string algo;
    size_t jumps = 0;
    int64_t ns = 0;
    uint64_t dequeues = 0;
    uint64_t neighbor_checks = 0;
    int64_t bytes = 0;
};

int run_bench(const std::string& kind, const std::string& jumps_list, uint64_t seed,
              const std::string& algo_list, const std::string& csv_path, int reps) {
    std::vector<size_t> sizes;
    for (const std::string& part : split_list(jumps_list)) {
        try {
            sizes.push_back(static_cast<size_t>(std::stoull(part)));
        } catch (...) {
            std::cerr << "jasm: bad --jumps value '" << part << "'\n";
            return kExitUsage;
        }
    }
    if (sizes.empty()) {
        std::cerr << "jasm: --jumps list is empty\n";
        return kExitUsage;
    }
    std::vector<std::string> algos = split_list(algo_list);
    if (algos.empty())
        algos.push_back("linear");
    for (const std::string& algo : algos) {
        if (algo != "linear" && algo != "iterative") {
            std::cerr << "jasm: unknown --algo '" << algo << "'\n";
            return kExitUsage;
        }
    }

    using clock = std::chrono::steady_clock;
    std::vector<BenchRow> rows;
    for (size_t n : sizes) {
        jasm::SourceProgram program;
        if (kind == "cascade") {
            program = n >= 1 ? jasm::gen_cascade(n) : jasm::SourceProgram{};
        } else {
            jasm::GenParams params;
            params.seed = seed;
            params.jump_count = n;
            program = jasm::gen_random(params);
        }
        const jasm::AllShortLayout base = jasm::layout_all_short(program);

        for (const std::string& algo : algos) {
            BenchRow row;
            row.algo = algo;
            row.jumps = program.jump_count();
            row.ns = -1;
            for (int rep = 0; rep < reps; ++rep) {
                if (algo == "linear") {
                    jasm::JumpTable table = base.jumps;  // fresh working copy, not timed
                    const auto t0 = clock::now();
                    jasm::RelaxationResult result = jasm::relax(table);
                    const auto t1 = clock::now();
                    const int64_t ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
                    if (row.ns < 0 || ns < row.ns)
                        row.ns = ns;
                    row.dequeues = result.stats.dequeue_count;
                    row.neighbor_checks = result.stats.neighbor_check_count;
                    if (rep == 0)
                        row.bytes = jasm::final_layout(program, result.assignment).total_size;
                } else {
                    const auto t0 = clock::now();
                    jasm::OracleReport report = jasm::iterative_fixpoint(program);
                    const auto t1 = clock::now();
                    const int64_t ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
                    if (row.ns < 0 || ns < row.ns)
                        row.ns = ns;
                    // For the iterative oracle: rounds, and jumps examined.
                    row.dequeues = report.iterations;
                    row.neighbor_checks = report.iterations * program.jump_count();
                    if (rep == 0)
                        row.bytes = report.total_size;
                }
            }
            rows.push_back(row);
        }
    }

    std::string csv = "algo,jumps,ns,dequeues,neighbor_checks,bytes\n";
    for (const BenchRow& row : rows) {
        csv += row.algo + "," + std::to_string(row.jumps) + "," + std::to_string(row.ns) + "," +
               std::to_string(row.dequeues) + "," + std::to_string(row.neighbor_checks) + "," +
               std::to_string(row.bytes) + "\n";
    }
    if (csv_path.empty()) {
        std::fwrite(csv.data(), 1, csv.size(), stdout);
        return kExitOk;
    }
    if (!write_file(csv_path, csv.data(), csv.size())) {
        std::cerr << "jasm: cannot write '" << csv_path << "'\n";
        return kExitUsage;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"miniature x86 jump assembler"};
    app.require_subcommand(1);

    std::string input, out_path, listing_path, mode_override;
    std::string algo = "linear";

    CLI::App* asm_cmd = app.add_subcommand("asm", "assemble a source file to a flat binary");
    asm_cmd->add_option("input", input, "source file")->required();
    asm_cmd->add_option("--out", out_path, "output binary path")->required();
    asm_cmd->add_option("--listing", listing_path, "write a text listing here");
    asm_cmd->add_option("--algo", algo, "linear|iterative")
        ->check(CLI::IsMember({"linear", "iterative"}));
    asm_cmd->add_option("--mode", mode_override, "override the .mode directive")
        ->check(CLI::IsMember({"16", "32", "64"}));

    CLI::App* explain_cmd = app.add_subcommand("explain", "print the per-jump decision table");
    explain_cmd->add_option("input", input, "source file")->required();
    explain_cmd->add_option("--mode", mode_override, "override the .mode directive")
        ->check(CLI::IsMember({"16", "32", "64"}));

    std::optional<size_t> perturb;
    CLI::App* compare_cmd = app.add_subcommand("compare", "cross-check linear, iterative and brute force");
    compare_cmd->add_option("input", input, "source file")->required();
    compare_cmd->add_option("--mode", mode_override, "override the .mode directive")
        ->check(CLI::IsMember({"16", "32", "64"}));
    compare_cmd->add_option("--perturb", perturb,
                            "debug: flip one decision of the linear result before comparing");

    std::string kind = "random", jumps_list = "16";
    uint64_t seed = 1;
    size_t gen_jumps = 16;
    int reps = 5;
    std::string csv_path, algo_list = "linear";

    CLI::App* gen_cmd = app.add_subcommand("gen", "generate a program");
    gen_cmd->add_option("--kind", kind, "paper|cascade|random")
        ->check(CLI::IsMember({"paper", "cascade", "random"}))
        ->required();
    gen_cmd->add_option("--jumps", gen_jumps, "jump count");
    gen_cmd->add_option("--seed", seed, "generator seed");
    gen_cmd->add_option("--out", out_path, "output path (default stdout)");
    gen_cmd->add_option("--mode", mode_override, "assembly mode")
        ->check(CLI::IsMember({"16", "32", "64"}));

    CLI::App* bench_cmd = app.add_subcommand("bench", "time the relaxation phase");
    bench_cmd->add_option("--kind", kind, "cascade|random")
        ->check(CLI::IsMember({"cascade", "random"}));
    bench_cmd->add_option("--jumps", jumps_list, "list of jump counts, e.g. 10000;20000;40000")
        ->required();
    bench_cmd->add_option("--seed", seed, "generator seed (random kind)");
    bench_cmd->add_option("--algo", algo_list, "list drawn from linear;iterative");
    bench_cmd->add_option("--csv", csv_path, "write CSV here (default stdout)");
    bench_cmd->add_option("--reps", reps, "repetitions per cell, minimum is reported")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (asm_cmd->parsed())
        return run_asm(input, out_path, listing_path, algo, mode_override);
    if (explain_cmd->parsed())
        return run_explain(input, mode_override);
    if (compare_cmd->parsed())
        return run_compare(input, mode_override, perturb);
    if (gen_cmd->parsed())
        return run_gen(kind, gen_jumps, seed, out_path, mode_override);
    if (bench_cmd->parsed())
        return run_bench(kind, jumps_list, seed, algo_list, csv_path, reps);
    return kExitUsage;
}
