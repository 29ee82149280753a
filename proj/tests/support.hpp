#pragma once

// Shared fixtures and independent reference checks for the unit tests.

#include <deque>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dpp/automata.hpp"
#include "dpp/hypothesis.hpp"
#include "dpp/model.hpp"
#include "dpp/oracle.hpp"
#include "dpp/solver.hpp"

namespace dpp::test {

inline ProcessSpec load_model(const std::string& name) {
    return load_process(std::string(DPP_MODELS_DIR) + "/" + name);
}

/// One local x, one global g, values 0 1 2 #, controls p and q.
inline ProcessSpec small_spec() {
    return parse_process(R"(kind finite
values 0 1 2 #
init_value 0
target #
globals g
locals x
init q
rules
q --spawn(p)--> q
p --i(x,1)--> p
)");
}

inline Action random_action(std::mt19937_64& rng, const ProcessSpec& spec, std::size_t values = 3) {
    const std::size_t nv = spec.variables.size();
    Action a;
    a.var = static_cast<VarId>(rng() % nv);
    a.value = static_cast<ValueId>(rng() % std::min(values, spec.values.size()));
    const bool local = spec.is_local(a.var);
    const bool flip = rng() % 2;
    a.kind = local ? (flip ? ActionKind::input : ActionKind::output) : (flip ? ActionKind::read : ActionKind::write);
    return a;
}

inline std::vector<Action> random_body(std::mt19937_64& rng, const ProcessSpec& spec, std::size_t max_len,
                                       std::size_t alphabet = 3) {
    // A small pool of actions keeps repetitions frequent.
    std::vector<Action> pool;
    while (pool.size() < alphabet) {
        Action a = random_action(rng, spec);
        if (std::find(pool.begin(), pool.end(), a) == pool.end()) {
            pool.push_back(a);
        }
    }
    std::vector<Action> w(rng() % (max_len + 1));
    for (Action& a : w) {
        a = pool[rng() % pool.size()];
    }
    return w;
}

/// b is a lift of a: walk b, matching letters of a in order, and allow any
/// extra letter that has already occurred in the matched part of a.
inline bool lift_member(const std::vector<Action>& a, const std::vector<Action>& b) {
    std::map<std::pair<std::size_t, std::size_t>, bool> memo;
    std::function<bool(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> bool {
        if (j == b.size()) {
            return i == a.size();
        }
        const auto key = std::make_pair(i, j);
        if (auto it = memo.find(key); it != memo.end()) {
            return it->second;
        }
        bool ok = false;
        if (i < a.size() && a[i] == b[j]) {
            ok = go(i + 1, j + 1);
        }
        if (!ok && std::find(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(i), b[j]) != a.begin() + static_cast<std::ptrdiff_t>(i)) {
            ok = go(i, j + 1);
        }
        memo[key] = ok;
        return ok;
    };
    return go(0, 0);
}

inline bool lift_member(const ExtWord& a, const ExtWord& b) {
    return a.head == b.head && lift_member(a.body, b.body);
}

/// Every distinct subsequence of w.
inline std::set<std::vector<Action>> subsequences(const std::vector<Action>& w) {
    std::set<std::vector<Action>> out;
    const std::size_t n = w.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::vector<Action> s;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask >> i & 1) {
                s.push_back(w[i]);
            }
        }
        out.insert(std::move(s));
    }
    return out;
}

/// Minimal elements by pairwise comparison with the lift check.
inline std::set<ExtWord> brute_core(const std::set<ExtWord>& words) {
    std::set<ExtWord> out;
    for (const ExtWord& w : words) {
        bool minimal = true;
        for (const ExtWord& v : words) {
            if (v != w && lift_member(v, w)) {
                minimal = false;
                break;
            }
        }
        if (minimal) {
            out.insert(w);
        }
    }
    return out;
}

/// Reachability of an accepting control by BFS over configurations of bounded height.
inline bool bfs_reaches(const Pds& pds, const StateId& start, std::size_t max_height) {
    std::set<StateId> seen{start};
    std::deque<StateId> queue{start};
    while (!queue.empty()) {
        const StateId c = queue.front();
        queue.pop_front();
        if (pds.accepting[c.control]) {
            return true;
        }
        for (const PdsRule& r : pds.rules) {
            if (r.from != c.control) {
                continue;
            }
            std::vector<SymbolId> rest = c.stack;
            if (r.pop) {
                if (rest.empty() || rest.front() != *r.pop) {
                    continue;
                }
                rest.erase(rest.begin());
            }
            StateId n{r.to, r.push};
            n.stack.insert(n.stack.end(), rest.begin(), rest.end());
            if (n.stack.size() <= max_height && seen.insert(n).second) {
                queue.push_back(n);
            }
        }
    }
    return false;
}

inline ExtWord word(const ProcessSpec& spec, const std::string& text) { return parse_ext_word(spec, text); }

inline std::set<ExtWord> words(const ProcessSpec& spec, std::initializer_list<const char*> texts) {
    std::set<ExtWord> out;
    for (const char* t : texts) {
        out.insert(parse_ext_word(spec, t));
    }
    return out;
}

inline std::vector<ActionLabel> labels(const ProcessSpec& spec, std::initializer_list<const char*> texts) {
    std::vector<ActionLabel> out;
    for (const char* t : texts) {
        out.push_back(parse_label(spec, t));
    }
    return out;
}

/// spawn(p) ext(alpha) for every head p and bounded set-semantics run alpha
/// of p within the given depth.
inline std::set<ExtWord> bounded_ext(const ProcessSpec& spec, std::size_t depth, std::size_t max_length,
                                     std::size_t steps = 40) {
    std::set<ExtWord> out;
    for (const StateId& p : heads_of(spec)) {
        const auto w = enumerate_ext_words(spec, p, ExploreBounds{depth, 1, steps, 6, 2'000'000}, max_length);
        out.insert(w.begin(), w.end());
    }
    return out;
}

/// (state, lambda) pairs of the root reachable by hypothesis steps under L.
inline std::set<std::pair<StateId, std::vector<ValueId>>> hyp_root_configurations(
    const ProcessSpec& spec, const Hypothesis& L, ExtensionMode mode = ExtensionMode::maximal,
    std::size_t cap = 200'000) {
    std::set<HypState> seen{initial_hyp_state(spec, spec.init)};
    std::deque<HypState> queue(seen.begin(), seen.end());
    std::set<std::pair<StateId, std::vector<ValueId>>> out;
    while (!queue.empty() && seen.size() < cap) {
        const HypState r = queue.front();
        queue.pop_front();
        out.insert({r.state, r.ctx.lambda});
        for (auto& [a, u] : hyp_successors(r, spec, L, mode)) {
            if (seen.insert(u).second) {
                queue.push_back(u);
            }
        }
    }
    return out;
}

}  // namespace dpp::test
