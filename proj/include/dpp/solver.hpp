#pragma once

// Decision procedures: the level-wise core fixpoint, the signature and out-set
// fixpoints for the futures fragments, and flattening for processes without locals.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dpp/hypothesis.hpp"
#include "dpp/model.hpp"
#include "dpp/oracle.hpp"

namespace dpp {

enum class VerdictKind : std::uint8_t { reachable, unreachable, resource_exceeded };
enum class Algorithm : std::uint8_t { automatic, general, gen_futures, simple_futures, flatten };

std::string to_string(VerdictKind k);
std::string to_string(Algorithm a);
/// "auto", "general", "gen-futures", "simple-futures", "flatten".
std::optional<Algorithm> parse_algorithm(std::string_view name);

struct Verdict {
    VerdictKind kind = VerdictKind::unreachable;
    Algorithm algorithm = Algorithm::general;
    std::optional<ExtWord> witness;    // ext-projection of the root run
    std::vector<ActionLabel> run;      // root labels of the run under the final hypothesis
    std::optional<ReachReport> concrete;  // multiset replay, when found within bounds
    std::size_t level = 0;             // level of the hypothesis that decided the verdict
    bool stabilized = false;
    std::vector<std::set<ExtWord>> levels;
    std::string detail;
    double seconds = 0;

    bool abstract_witness() const { return kind == VerdictKind::reachable && !concrete; }
};

struct SolverCaps {
    CoreOptions core;
    std::size_t max_levels = 64;
    /// Replay Reachable verdicts with the multiset oracle.
    bool validate = true;
    ExploreBounds validation_bounds{3, 3, 40, 6, 200'000};
    /// Refuse futures solvers when the initial-value proviso fails.
    bool strict_fragment = false;
    /// Compute the cores of different spawn heads concurrently.
    bool parallel = true;
};

struct LevelCores {
    std::vector<std::set<ExtWord>> levels;
    std::optional<std::size_t> stabilized_at;
};

/// Spawn targets plus the initial state.
std::vector<StateId> heads_of(const ProcessSpec& spec);
/// spawn(p) for every spawn target: children that are created but never move.
/// Level 0 is computed under this hypothesis, so spawns may create no children.
std::set<ExtWord> base_hypothesis(const ProcessSpec& spec);

/// L_0, L_1, ... up to level upto (inclusive) or stabilization by prefix-set equality.
LevelCores levelwise_cores(const ProcessSpec& spec, std::optional<std::size_t> upto, bool consistent = false,
                           const SolverCaps& caps = {});
/// Signature sets per level, same stopping rule.
LevelCores levelwise_signatures(const ProcessSpec& spec, std::optional<std::size_t> upto,
                                const SolverCaps& caps = {});
/// Out-sets per level, same stopping rule.
LevelCores levelwise_outsets(const ProcessSpec& spec, std::optional<std::size_t> upto,
                             const SolverCaps& caps = {});

Verdict solve_general(const ProcessSpec& spec, const SolverCaps& caps = {});
Verdict solve_gen_futures(const ProcessSpec& spec, const SolverCaps& caps = {});
Verdict solve_simple_futures(const ProcessSpec& spec, const SolverCaps& caps = {});
/// flatten then solve_general; throws FragmentMismatch when locals exist.
Verdict solve_flattened(const ProcessSpec& spec, const SolverCaps& caps = {});
/// Most specific eligible solver: simple futures, generalized futures, flatten, general.
Algorithm select_algorithm(const ProcessSpec& spec);
/// Dispatches; ResourceExceeded becomes a resource_exceeded verdict.
Verdict solve(const ProcessSpec& spec, Algorithm algorithm, const SolverCaps& caps = {});

struct FlattenOptions {
    /// Wake-up rules for every control rather than only spawn targets.
    bool all_states = false;
};

/// flat(S): spawns become writes to a fresh global g_sp, plus a one-shot spawn scaffold.
ProcessSpec flatten(const ProcessSpec& spec, const FlattenOptions& options = {});

/// Leader and contributor of a flattened process.
struct CdSystem {
    ProcessSpec leader;
    ProcessSpec contributor;
};

/// Throws NotFlat unless there is exactly one spawn rule, leaving the initial
/// control, which no rule re-enters.
CdSystem export_cd_system(const ProcessSpec& spec);
std::string to_text(const CdSystem& cd);
CdSystem parse_cd(std::string_view text);
/// A fresh root spawning contributors then continuing as the leader.
ProcessSpec import_cd(const CdSystem& cd);

std::string report_text(const ProcessSpec& spec, const Verdict& v, bool emit_witness = false);
std::string report_json(const ProcessSpec& spec, const Verdict& v, bool emit_witness = false);

}  // namespace dpp
