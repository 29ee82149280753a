// Acceptance checks: one PASS/FAIL line per criterion.
// With --expect-fail, the exit status is 0 iff exactly the listed criteria fail.

#include <algorithm>
#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "dpp/corpus.hpp"
#include "dpp/solver.hpp"
#include "dpp/words.hpp"
#include "support.hpp"

using namespace dpp;
using namespace dpp::test;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string join_words(const ProcessSpec& s, const std::set<ExtWord>& ws) {
    std::string out;
    for (const ExtWord& w : ws) {
        out += (out.empty() ? "" : ", ") + format_word(s, w);
    }
    return out.empty() ? "none" : out;
}

std::set<ExtWord> with_head(const ProcessSpec& s, const std::set<ExtWord>& ws, const std::string& control) {
    std::set<ExtWord> out;
    for (const ExtWord& w : ws) {
        if (w.head && s.controls[w.head->control] == control) {
            out.insert(w);
        }
    }
    return out;
}

std::set<ExtWord> minus(const std::set<ExtWord>& a, const std::set<ExtWord>& b) {
    std::set<ExtWord> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

bool has_target_write(const ProcessSpec& s, const ExtWord& w) {
    return std::any_of(w.body.begin(), w.body.end(), [&](const Action& a) {
        return a.value == s.target && (a.kind == ActionKind::write || a.kind == ActionKind::output);
    });
}

Outcome example1_reachability() {
    const auto t0 = Clock::now();
    const ProcessSpec s = load_model("example1.dpp");
    const Verdict v = solve(s, Algorithm::general);
    const double t = since(t0);
    const Action target{ActionKind::write, *s.find_variable("g0"), s.target};
    const bool contains =
        v.witness && std::find(v.witness->body.begin(), v.witness->body.end(), target) != v.witness->body.end();
    std::ostringstream d;
    d << to_string(v.kind) << ", witness " << (v.witness ? format_word(s, *v.witness) : "none") << ", " << t
      << " s (limit 5 s)";
    return {v.kind == VerdictKind::reachable && contains && t < 5, d.str()};
}

Outcome example1_core() {
    const ProcessSpec s = load_model("example1.dpp");
    const LevelCores lc = levelwise_cores(s, 1);
    const std::set<ExtWord> got = prefix_closure(lc.levels.at(std::min<std::size_t>(1, lc.levels.size() - 1)));
    const std::set<ExtWord> expected = prefix_closure(
        words(s, {"spawn(q) w(g0,#)", "spawn(p) i(x,1) o(x,2) o(x,3)", "spawn(p) i(x,1) o(x,3) o(x,2)"}));
    std::ostringstream d;
    d << "missing {" << join_words(s, minus(expected, got)) << "}, extra {" << join_words(s, minus(got, expected))
      << "}";
    return {got == expected, d.str()};
}

Outcome example2_reachability() {
    const auto t0 = Clock::now();
    const ProcessSpec s = load_model("example2.dpp");
    const Verdict g = solve(s, Algorithm::general);
    const Verdict f = solve(s, Algorithm::gen_futures);
    const LevelCores lc = levelwise_signatures(s, 1);
    const double t = since(t0);
    const std::set<ExtWord> level1 = lc.levels.at(std::min<std::size_t>(1, lc.levels.size() - 1));
    const std::set<ExtWord> expected =
        prefix_closure(words(s, {"spawn(p) i(x,0) o(x,1)", "spawn(p) i(x,1) o(x,2)", "spawn(p) i(x,1) o(x,0)"}));
    const std::set<ExtWord> children = with_head(s, level1, "p");
    std::ostringstream d;
    d << "general " << to_string(g.kind) << ", gen-futures " << to_string(f.kind) << ", child signatures "
      << (children == expected ? "match" : "differ: " + join_words(s, children)) << ", root words {"
      << join_words(s, minus(level1, children)) << "}, " << t << " s (limit 10 s)";
    return {g.kind == VerdictKind::reachable && f.kind == VerdictKind::reachable && children == expected && t < 10,
            d.str()};
}

Outcome multiplicity() {
    const ProcessSpec s = load_model("example1.dpp");
    auto run = [&](std::size_t children) { return explore_multiset(s, ExploreBounds{3, children, 30, 8, 2'000'000}); };
    const ReachReport one = run(1);
    const ReachReport two = run(2);
    const ReachReport again = run(2);
    bool same = two.run.size() == again.run.size();
    for (std::size_t i = 0; same && i < two.run.size(); ++i) {
        same = two.run[i].label == again.run[i].label && two.run[i].tree == again.run[i].tree;
    }
    std::ostringstream d;
    d << "1 child: " << (one.found ? "witness" : "no witness") << (one.truncated ? " (truncated)" : " (exhaustive)")
      << ", 2 children: " << (two.found ? "witness of " + std::to_string(two.run.size()) + " steps" : "no witness")
      << ", repeat " << (same ? "identical" : "differs");
    return {!one.found && !one.truncated && two.found && same, d.str()};
}

struct OracleCorpus {
    int instances = 0;
    int multiset_found = 0;
    int set_found = 0;
    int reachable = 0;
    int solver_misses = 0;
    int set_disagreements = 0;
    int truncated = 0;
    double seconds = 0;
};

const OracleCorpus& oracle_corpus() {
    static const OracleCorpus result = [] {
        OracleCorpus r;
        const auto t0 = Clock::now();
        Rng rng(1);
        const ExploreBounds bounds{3, 3, 30, 6, 200'000};
        SolverCaps caps;
        caps.validate = false;
        for (int n = 0; n < 100; ++n) {
            const ProcessSpec s = random_spec(rng);
            const ReachReport m = explore_multiset(s, bounds);
            const ReachReport st = explore_set(s, bounds);
            const Verdict v = solve(s, Algorithm::general, caps);
            ++r.instances;
            r.multiset_found += m.found;
            r.set_found += st.found;
            r.reachable += v.kind == VerdictKind::reachable;
            r.truncated += m.truncated + st.truncated;
            r.solver_misses += m.found && v.kind != VerdictKind::reachable;
            r.set_disagreements += m.found != st.found;
        }
        r.seconds = since(t0);
        return r;
    }();
    return result;
}

Outcome oracle_agreement() {
    const OracleCorpus& c = oracle_corpus();
    std::ostringstream d;
    d << c.instances << " specs, multiset witnesses " << c.multiset_found << ", solver Reachable " << c.reachable
      << ", disagreements " << c.solver_misses << ", " << c.seconds << " s (limit 300 s)";
    return {c.instances == 100 && c.solver_misses == 0 && c.seconds < 300, d.str()};
}

Outcome set_multiset() {
    const OracleCorpus& c = oracle_corpus();
    std::ostringstream d;
    d << "multiset witnesses " << c.multiset_found << ", set witnesses " << c.set_found << ", disagreements "
      << c.set_disagreements << ", truncated runs " << c.truncated;
    return {c.set_disagreements == 0, d.str()};
}

/// Inserts already-seen letters at random points.
std::vector<Action> random_lift(Rng& rng, const std::vector<Action>& a) {
    std::vector<Action> out;
    for (const Action& x : a) {
        out.push_back(x);
        while (rng() % 3 == 0) {
            out.push_back(out[rng() % out.size()]);
        }
    }
    return out;
}

Outcome wqo_laws() {
    const ProcessSpec s = small_spec();
    const StateId p{*s.find_control("p"), {}};
    Rng rng(7);
    int cases = 0;
    std::map<std::string, int> failures;
    auto fail_if = [&](bool bad, const char* law) {
        if (bad) {
            ++failures[law];
        }
    };
    for (int n = 0; n < 1000; ++n, ++cases) {
        const ExtWord w{p, random_body(rng, s, 8)};
        fail_if(sig(sig(w)) != sig(w), "sig idempotence");
        fail_if(!lift_member(sig(w), w), "member of lift(sig)");
        fail_if(!preceq(sig(w), w), "sig below word");
        fail_if(!preceq(w, w), "reflexivity");

        const ExtWord b{p, random_lift(rng, w.body)};
        const ExtWord c{p, random_lift(rng, b.body)};
        fail_if(!lift_member(w, b) || !preceq(w, b), "lift order");
        fail_if(!preceq(b, c) || !preceq(w, c), "transitivity");
        const ExtWord u{p, random_body(rng, s, 6)};
        fail_if(preceq(u, w) != lift_member(u, w), "order matches lift oracle");

        std::set<ExtWord> pool;
        for (int i = 0; i < 6; ++i) {
            pool.insert(ExtWord{p, random_body(rng, s, 5, 2)});
        }
        const std::set<ExtWord> core = core_of(pool);
        bool antichain = true;
        for (const ExtWord& x : core) {
            for (const ExtWord& y : core) {
                antichain = antichain && (x == y || !preceq(x, y));
            }
        }
        fail_if(!antichain, "core antichain");
        fail_if(core_of(core) != core, "core idempotence");
        fail_if(core != brute_core(pool), "core matches pairwise minima");

        const Decomposition dec = canonical_decomposition(w.body);
        bool blocks_ok = dec.blocks.size() == dec.letters.size() + 1 && dec.blocks[0].empty();
        for (std::size_t i = 1; blocks_ok && i < dec.blocks.size(); ++i) {
            for (const Action& a : dec.blocks[i]) {
                blocks_ok = blocks_ok && std::find(dec.letters.begin(), dec.letters.begin() + i, a) !=
                                             dec.letters.begin() + i;
            }
        }
        fail_if(dec.recompose() != w.body || dec.letters != sig(w.body) || !blocks_ok, "decomposition round trip");
    }
    int total = 0;
    std::ostringstream d;
    for (const auto& [law, k] : failures) {
        total += k;
        d << law << " x" << k << "; ";
    }
    d << cases << " generated cases, 10 laws each, failures " << total;
    return {cases >= 1000 && total == 0, d.str()};
}

Outcome hypothesis_depth() {
    Rng rng(8);
    int equal = 0;
    std::size_t configurations = 0;
    for (int n = 0; n < 20; ++n) {
        const ProcessSpec s = random_spec(rng);
        const Hypothesis L(bounded_ext(s, 0, 6));
        const auto hyp = hyp_root_configurations(s, L);
        const auto set = root_configurations(s, s.init, ExploreBounds{1, 1, 40, 6, 2'000'000});
        equal += hyp == set;
        configurations += set.size();
    }
    std::ostringstream d;
    d << equal << "/20 specs with equal root configurations (" << configurations << " pairs in total)";
    return {equal == 20, d.str()};
}

Outcome fragment_agreement() {
    SolverCaps caps;
    caps.validate = false;
    Rng rng(9);
    std::ostringstream d;
    bool ok = true;
    auto run = [&](Algorithm a, const RandomSpecParams& params) {
        int agree = 0;
        int reachable = 0;
        for (int n = 0; n < 20; ++n) {
            const ProcessSpec s = random_spec(rng, params);
            const Verdict g = solve(s, Algorithm::general, caps);
            const Verdict v = solve(s, a, caps);
            agree += g.kind == v.kind && g.kind != VerdictKind::resource_exceeded;
            reachable += g.kind == VerdictKind::reachable;
        }
        d << (d.tellp() > 0 ? "; " : "") << to_string(a) << " " << agree << "/20 (" << reachable << " Reachable)";
        ok = ok && agree == 20;
    };
    RandomSpecParams gen;
    gen.fragment = Fragment::gen_futures;
    run(Algorithm::gen_futures, gen);
    RandomSpecParams simple;
    simple.fragment = Fragment::simple_futures;
    run(Algorithm::simple_futures, simple);
    RandomSpecParams flat;
    flat.fragment = Fragment::no_locals;
    flat.max_controls = 3;
    flat.max_rules = 6;
    run(Algorithm::flatten, flat);
    return {ok, d.str()};
}

Outcome sat_reduction() {
    Rng rng(10);
    int agree = 0;
    int satisfiable = 0;
    for (int n = 0; n < 20; ++n) {
        const Cnf cnf = random_3cnf(rng, 4, 6);
        const bool sat = brute_force_sat(cnf);
        const Verdict v = solve(encode_sat(cnf), Algorithm::simple_futures);
        agree += (v.kind == VerdictKind::reachable) == sat && v.kind != VerdictKind::resource_exceeded;
        satisfiable += sat;
    }
    // Small 3-CNFs are rarely unsatisfiable; sample some within the same limits.
    int unsat_agree = 0;
    int unsat = 0;
    for (int tries = 0; unsat < 5 && tries < 100'000; ++tries) {
        const Cnf cnf = random_3cnf(rng, 2, 6);
        if (brute_force_sat(cnf)) {
            continue;
        }
        ++unsat;
        unsat_agree += solve(encode_sat(cnf), Algorithm::simple_futures).kind == VerdictKind::unreachable;
    }
    std::ostringstream d;
    d << agree << "/20 agree with brute force (" << satisfiable << " satisfiable), " << unsat_agree << "/" << unsat
      << " sampled unsatisfiable instances Unreachable";
    return {agree == 20 && unsat == 5 && unsat_agree == 5, d.str()};
}

Outcome pushdown_saturation() {
    Rng rng(11);
    int agree = 0;
    int replayed = 0;
    int witnesses = 0;
    for (int n = 0; n < 30; ++n) {
        const PdsInstance inst = random_pds(rng);
        const auto w = nonempty_witness(inst.pds, inst.start);
        agree += w.has_value() == bfs_reaches(inst.pds, inst.start, 6);
        if (w) {
            ++witnesses;
            replayed += replay(inst.pds, inst.start, *w);
        }
    }
    std::ostringstream d;
    d << agree << "/30 agree with bounded BFS, " << replayed << "/" << witnesses << " witnesses replay";
    return {agree == 30 && replayed == witnesses, d.str()};
}

Outcome pushdown_end_to_end() {
    const auto t0 = Clock::now();
    const ProcessSpec s = load_model("example3.dpp");
    SolverCaps caps;
    caps.validation_bounds.max_stack_height = 4;
    const Verdict v = solve(s, Algorithm::general, caps);
    const double t = since(t0);
    std::ostringstream d;
    d << to_string(v.kind) << " at level " << v.level << ", witness " << (v.witness ? format_word(s, *v.witness) : "none")
      << ", multiset replay " << (v.concrete ? std::to_string(v.concrete->run.size()) + " steps" : "none") << ", " << t
      << " s (limit 30 s)";
    const bool ok = s.kind == ProcessKind::pushdown && v.kind == VerdictKind::reachable && v.witness &&
                    has_target_write(s, *v.witness) && v.concrete && t < 30;
    return {ok, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    std::vector<int> only;
    std::vector<int> expect_fail;
    app.add_option("--only", only, "criteria to run")->delimiter(',');
    app.add_option("--expect-fail", expect_fail, "criteria known to fail")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"example-1 reachability", example1_reachability},
        {"example-1 core at level 1", example1_core},
        {"example-2 reachability and signatures", example2_reachability},
        {"multiplicity sensitivity", multiplicity},
        {"oracle agreement", oracle_agreement},
        {"set/multiset agreement", set_multiset},
        {"order laws", wqo_laws},
        {"hypothesis runs one level deeper", hypothesis_depth},
        {"fragment agreement", fragment_agreement},
        {"SAT reduction", sat_reduction},
        {"pushdown saturation", pushdown_saturation},
        {"pushdown end to end", pushdown_end_to_end},
    };
    std::cout << std::setprecision(3);
    std::set<int> failed;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) {
            continue;
        }
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) {
            failed.insert(id);
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << id << " " << criteria[i].first << ": " << o.detail << " ["
                  << since(t0) << " s]" << std::endl;
    }
    std::set<int> expected;
    for (int id : expect_fail) {
        if (only.empty() || std::find(only.begin(), only.end(), id) != only.end()) {
            expected.insert(id);
        }
    }
    std::cout << failed.size() << " failing";
    if (!expected.empty()) {
        std::cout << ", expected failures:";
        for (int id : expected) {
            std::cout << " " << id;
        }
    }
    std::cout << std::endl;
    return failed == expected ? 0 : 1;
}
