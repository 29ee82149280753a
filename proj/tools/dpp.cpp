// dpp: reachability checker for dynamic parametric processes.
//
// Exit status: 0 Reachable, 1 Unreachable, 2 resource or usage error.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dpp/corpus.hpp"
#include "dpp/oracle.hpp"
#include "dpp/solver.hpp"
#include "dpp/words.hpp"

namespace fs = std::filesystem;
using namespace dpp;

namespace {

constexpr int kReachable = 0;
constexpr int kUnreachable = 1;
constexpr int kError = 2;

int exit_code(VerdictKind k) {
    switch (k) {
        case VerdictKind::reachable:
            return kReachable;
        case VerdictKind::unreachable:
            return kUnreachable;
        case VerdictKind::resource_exceeded:
            return kError;
    }
    return kError;
}

struct BoundsArgs {
    std::size_t depth = 3;
    std::size_t children = 3;
    std::size_t steps = 30;
    std::size_t stack = 8;
    std::size_t states = 200'000;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--depth", depth, "Maximum spawn depth")->capture_default_str();
        cmd->add_option("--children", children, "Maximum children per node (multiset only)")->capture_default_str();
        cmd->add_option("--steps", steps, "Maximum run length")->capture_default_str();
        cmd->add_option("--stack", stack, "Maximum stack height")->capture_default_str();
        cmd->add_option("--states", states, "Maximum explored configurations")->capture_default_str();
    }

    ExploreBounds bounds() const { return {depth, children, steps, stack, states}; }
};

struct CheckArgs {
    std::string file;
    std::string algorithm = "auto";
    bool emit_witness = false;
    bool json = false;
    bool strict = false;
    bool no_validate = false;
    std::size_t max_levels = 64;
    std::size_t max_states = 2'000'000;
    std::size_t max_iterations = 100'000;
};

struct CoreArgs {
    std::string file;
    std::size_t level = 0;
    bool consistent = false;
    std::string kind = "core";
};

struct OracleArgs {
    std::string file;
    std::string semantics = "multiset";
    BoundsArgs bounds;
    bool trace = false;
};

struct FlattenArgs {
    std::string file;
    std::string out;
    bool all_states = false;
    bool cd = false;
};

struct CompareArgs {
    std::string dir;
    std::uint64_t seed = 7;
    std::size_t count = 50;
    std::size_t jobs = 1;
    BoundsArgs bounds;
};

int run_check(const CheckArgs& a) {
    const ProcessSpec spec = load_process(a.file);
    const auto algorithm = parse_algorithm(a.algorithm);
    if (!algorithm) {
        std::cerr << "unknown algorithm: " << a.algorithm << "\n";
        return kError;
    }
    SolverCaps caps;
    caps.max_levels = a.max_levels;
    caps.validate = !a.no_validate;
    caps.strict_fragment = a.strict;
    caps.core.max_states = a.max_states;
    caps.core.max_iterations = a.max_iterations;
    const Verdict v = solve(spec, *algorithm, caps);
    std::cout << (a.json ? report_json(spec, v, a.emit_witness) + "\n" : report_text(spec, v, a.emit_witness));
    return exit_code(v.kind);
}

int run_core(const CoreArgs& a) {
    const ProcessSpec spec = load_process(a.file);
    LevelCores cores;
    if (a.kind == "core") {
        cores = levelwise_cores(spec, a.level, a.consistent);
    } else if (a.kind == "signatures") {
        cores = levelwise_signatures(spec, a.level);
    } else {
        cores = levelwise_outsets(spec, a.level);
    }
    // Past stabilization every level equals the last computed one.
    const std::size_t k = std::min(a.level, cores.levels.size() - 1);
    for (const ExtWord& w : prefix_closure(cores.levels[k])) {
        std::cout << format_word(spec, w) << "\n";
    }
    if (cores.stabilized_at) {
        std::cerr << "stabilized at level " << *cores.stabilized_at << "\n";
    }
    return 0;
}

int run_oracle(const OracleArgs& a) {
    const ProcessSpec spec = load_process(a.file);
    const ExploreBounds b = a.bounds.bounds();
    const ReachReport r = a.semantics == "set" ? explore_set(spec, b) : explore_multiset(spec, b);
    if (r.found) {
        std::cout << "WitnessFound (" << r.run.size() << " steps, " << r.explored << " configurations)\n";
        std::cout << "labels: " << format_labels(spec, r.labels()) << "\n";
        if (a.trace) {
            std::cout << format_trace(spec, r);
        }
        return kReachable;
    }
    std::cout << (r.truncated ? "NoWitnessWithinBounds (truncated, " : "NoWitnessWithinBounds (")
              << r.explored << " configurations)\n";
    return r.truncated ? kError : kUnreachable;
}

int run_flatten(const FlattenArgs& a) {
    const ProcessSpec spec = load_process(a.file);
    const ProcessSpec flat = flatten(spec, FlattenOptions{a.all_states});
    const std::string text = a.cd ? to_text(export_cd_system(flat)) : to_text(flat);
    if (a.out.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream out(a.out);
    if (!out) {
        std::cerr << "cannot write " << a.out << "\n";
        return kError;
    }
    out << text;
    return 0;
}

struct CompareRow {
    std::string name;
    bool oracle_found = false;
    bool oracle_truncated = false;
    VerdictKind solver = VerdictKind::unreachable;
    double seconds = 0;
};

CompareRow compare_one(std::string name, const ProcessSpec& spec, const ExploreBounds& b) {
    CompareRow row;
    row.name = std::move(name);
    const auto t0 = std::chrono::steady_clock::now();
    const ReachReport r = explore_multiset(spec, b);
    row.oracle_found = r.found;
    row.oracle_truncated = r.truncated;
    SolverCaps caps;
    caps.validate = false;
    row.solver = solve(spec, Algorithm::general, caps).kind;
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

int run_compare(const CompareArgs& a) {
    std::vector<std::pair<std::string, ProcessSpec>> corpus;
    if (!a.dir.empty()) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(a.dir)) {
            if (e.path().extension() == ".dpp" || e.path().extension() == ".json") {
                files.push_back(e.path());
            }
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            corpus.emplace_back(f.filename().string(), load_process(f.string()));
        }
    } else {
        Rng rng(a.seed);
        for (std::size_t i = 0; i < a.count; ++i) {
            corpus.emplace_back("seed" + std::to_string(a.seed) + "#" + std::to_string(i), random_spec(rng));
        }
    }

    const ExploreBounds b = a.bounds.bounds();
    std::vector<CompareRow> rows(corpus.size());
    const std::size_t jobs = std::max<std::size_t>(1, a.jobs);
    for (std::size_t start = 0; start < corpus.size(); start += jobs) {
        std::vector<std::future<CompareRow>> batch;
        for (std::size_t i = start; i < std::min(corpus.size(), start + jobs); ++i) {
            batch.push_back(std::async(std::launch::async, compare_one, corpus[i].first, std::cref(corpus[i].second), b));
        }
        for (std::size_t i = 0; i < batch.size(); ++i) {
            rows[start + i] = batch[i].get();
        }
    }

    std::size_t table[2][3] = {};
    std::size_t disagreements = 0;
    std::size_t truncated = 0;
    for (const CompareRow& r : rows) {
        ++table[r.oracle_found ? 0 : 1][static_cast<int>(r.solver)];
        truncated += r.oracle_truncated;
        if (r.oracle_found && r.solver != VerdictKind::reachable) {
            ++disagreements;
            std::cout << "disagreement: " << r.name << "\n";
        }
    }
    std::cout << "oracle \\ solver      Reachable  Unreachable  ResourceExceeded\n";
    const char* names[2] = {"WitnessFound         ", "NoWitnessWithinBounds"};
    for (int i = 0; i < 2; ++i) {
        std::cout << names[i];
        for (int j = 0; j < 3; ++j) {
            std::cout << "  " << table[i][j];
        }
        std::cout << "\n";
    }
    std::cout << "instances " << rows.size() << ", truncated oracle runs " << truncated << ", disagreements "
              << disagreements << "\n";
    return disagreements == 0 ? 0 : kUnreachable;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reachability for dynamic parametric processes"};
    app.require_subcommand(1);

    CheckArgs check;
    auto* c = app.add_subcommand("check", "Decide reachability of the target value");
    c->add_option("file", check.file, "Process file")->required()->check(CLI::ExistingFile);
    c->add_option("--algorithm", check.algorithm, "auto|general|gen-futures|simple-futures|flatten")
        ->capture_default_str()
        ->check(CLI::IsMember({"auto", "general", "gen-futures", "simple-futures", "flatten"}));
    c->add_flag("--emit-witness", check.emit_witness, "Print the root run and the concrete trace");
    c->add_flag("--json", check.json, "Machine-readable output");
    c->add_flag("--strict", check.strict, "Refuse futures solvers when the initial-value proviso fails");
    c->add_flag("--no-validate", check.no_validate, "Skip the multiset replay of Reachable verdicts");
    c->add_option("--max-levels", check.max_levels)->capture_default_str();
    c->add_option("--max-states", check.max_states, "Product state cap")->capture_default_str();
    c->add_option("--max-iterations", check.max_iterations, "Core refinement cap")->capture_default_str();

    CoreArgs core;
    auto* k = app.add_subcommand("core", "Print the hypothesis of a level, prefix-closed");
    k->add_option("file", core.file)->required()->check(CLI::ExistingFile);
    k->add_option("--level", core.level)->capture_default_str();
    k->add_flag("--consistent", core.consistent, "Restrict to consistent runs");
    k->add_option("--kind", core.kind, "core|signatures|outsets")
        ->capture_default_str()
        ->check(CLI::IsMember({"core", "signatures", "outsets"}));

    OracleArgs oracle;
    auto* o = app.add_subcommand("oracle", "Bounded explicit exploration");
    o->add_option("file", oracle.file)->required()->check(CLI::ExistingFile);
    o->add_option("--semantics", oracle.semantics)
        ->capture_default_str()
        ->check(CLI::IsMember({"multiset", "set"}));
    o->add_flag("--trace", oracle.trace, "Print the configuration trace");
    oracle.bounds.add_to(o);

    FlattenArgs fl;
    auto* f = app.add_subcommand("flatten", "Replace spawns by writes to a fresh global");
    f->add_option("file", fl.file)->required()->check(CLI::ExistingFile);
    f->add_option("--out", fl.out, "Output file (default: standard output)");
    f->add_flag("--all-states", fl.all_states, "Wake-up rules for every control");
    f->add_flag("--cd", fl.cd, "Emit the leader/contributor form");

    CompareArgs cmp;
    auto* m = app.add_subcommand("compare", "Multiset oracle against the general solver");
    auto* dir = m->add_option("--dir", cmp.dir, "Directory of process files")->check(CLI::ExistingDirectory);
    m->add_option("--seed", cmp.seed, "Generator seed")->capture_default_str()->excludes(dir);
    m->add_option("--count", cmp.count, "Generated instances")->capture_default_str()->excludes(dir);
    m->add_option("--jobs", cmp.jobs, "Concurrent workers")->capture_default_str();
    cmp.bounds.add_to(m);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kError;
    }

    try {
        if (*c) {
            return run_check(check);
        }
        if (*k) {
            return run_core(core);
        }
        if (*o) {
            return run_oracle(oracle);
        }
        if (*f) {
            return run_flatten(fl);
        }
        return run_compare(cmp);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
    } catch (const ResourceExceeded& e) {
        std::cerr << "resource exceeded: " << e.what() << "\n";
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return kError;
}
