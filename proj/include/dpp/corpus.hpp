#pragma once

// Seeded generators for random processes, pushdown systems and CNF formulas,
// plus the encoding of CNF satisfiability into a simple-futures process.

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dpp/automata.hpp"
#include "dpp/model.hpp"

namespace dpp {

using Rng = std::mt19937_64;

enum class Fragment : std::uint8_t { any, gen_futures, simple_futures, no_locals };

struct RandomSpecParams {
    std::size_t max_controls = 4;
    std::size_t max_values = 3;  // including the target value
    std::size_t max_locals = 1;
    std::size_t max_globals = 1;
    std::size_t max_rules = 10;
    Fragment fragment = Fragment::any;
    /// Chance that a write or output uses the target value.
    double target_bias = 0.25;
};

/// Values are "0" (initial), "1", ... and "#"; controls q0 (initial), q1, ...
/// Futures fragments never use the initial value in external actions.
ProcessSpec random_spec(Rng& rng, const RandomSpecParams& params = {});

struct RandomPdsParams {
    std::size_t max_controls = 3;
    std::size_t max_symbols = 3;
    std::size_t max_rules = 8;
    std::size_t max_push = 2;
    std::size_t letters = 2;
};

struct PdsInstance {
    Pds pds;
    StateId start;
};

PdsInstance random_pds(Rng& rng, const RandomPdsParams& params = {});
/// Random explicit automaton over the given letters, every state reachable from 0.
FiniteAutomaton random_automaton(Rng& rng, const std::vector<ActionLabel>& letters, std::size_t states);

/// Breadth-first search over configurations with stack height <= max_height.
std::optional<Witness> bounded_search(const Pds& pds, const StateId& start, std::size_t max_height,
                                      FiniteView* view = nullptr);

/// Literals are +v or -v for variables 1..vars.
struct Cnf {
    std::size_t vars = 0;
    std::vector<std::vector<int>> clauses;
};

Cnf random_3cnf(Rng& rng, std::size_t max_vars = 4, std::size_t max_clauses = 6);
bool brute_force_sat(const Cnf& cnf);
Cnf parse_dimacs(std::string_view text);
std::string to_dimacs(const Cnf& cnf);

/// The root picks t_i or f_i per variable and spawns it; t_i (f_i) repeatedly
/// outputs c_j for every clause j the literal satisfies; the root then reads
/// c_1 ... c_m in order and outputs #. Reachable iff the formula is satisfiable.
ProcessSpec encode_sat(const Cnf& cnf);

}  // namespace dpp
