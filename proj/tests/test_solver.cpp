#include <doctest.h>

#include <json.hpp>

#include "dpp/corpus.hpp"
#include "dpp/errors.hpp"
#include "dpp/solver.hpp"
#include "dpp/words.hpp"
#include "support.hpp"

using namespace dpp;
using namespace dpp::test;

namespace {

SolverCaps quick_caps() {
    SolverCaps caps;
    caps.validate = false;
    caps.core.max_iterations = 20'000;
    return caps;
}

std::set<std::string> rule_strings(const ProcessSpec& s) {
    std::set<std::string> out;
    for (const Rule& r : s.rules) {
        out.insert(s.controls[r.from] + " --" + format_label(s, r.label) + "--> " + s.controls[r.to]);
    }
    return out;
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

// Example 1 with x turned into a global: inputs become reads, outputs writes.
const char* kExample1Global = R"(kind finite
values init 1 2 3 #
init_value init
target #
globals g0 x
init q
rules
q  --spawn(p)--> q1
q1 --w(x,1)-->   q2
q2 --r(x,2)-->   q3
q3 --r(x,3)-->   q4
q4 --w(g0,#)-->  q5
p  --r(x,1)-->   p1
p1 --w(x,2)-->   p2
p1 --w(x,3)-->   p2
p2 --tau-->      p
)";

RandomSpecParams small_params(Fragment f = Fragment::any) {
    RandomSpecParams params;
    params.max_controls = 3;
    params.max_rules = 6;
    params.fragment = f;
    return params;
}

}  // namespace

TEST_CASE("shipped examples") {
    SUBCASE("example 1") {
        const ProcessSpec s = load_model("example1.dpp");
        const Verdict v = solve_general(s);
        REQUIRE(v.kind == VerdictKind::reachable);
        REQUIRE(v.witness);
        const Action target{ActionKind::write, *s.find_variable("g0"), s.target};
        CHECK(std::find(v.witness->body.begin(), v.witness->body.end(), target) != v.witness->body.end());
        CHECK(v.level <= 2);
        REQUIRE(v.concrete);
        CHECK(v.concrete->found);
        CHECK(is_consistent(s, v.run));
    }
    SUBCASE("example 2 under both procedures") {
        const ProcessSpec s = load_model("example2.dpp");
        CHECK(solve_general(s).kind == VerdictKind::reachable);
        CHECK(solve_gen_futures(s).kind == VerdictKind::reachable);
        SolverCaps strict;
        strict.strict_fragment = true;
        CHECK_THROWS_AS(solve_gen_futures(s, strict), FragmentMismatch);
    }
    SUBCASE("pushdown example") {
        const ProcessSpec s = load_model("example3.dpp");
        SolverCaps caps;
        caps.validation_bounds.max_stack_height = 4;
        const Verdict v = solve_general(s, caps);
        CHECK(v.kind == VerdictKind::reachable);
        CHECK(v.concrete);
    }
    SUBCASE("no rules") {
        const ProcessSpec s = load_model("empty.dpp");
        const Verdict v = solve_general(s);
        CHECK(v.kind == VerdictKind::unreachable);
        CHECK(v.level == 0);
        CHECK(v.stabilized);
    }
}

TEST_CASE("level cores of example 1") {
    const ProcessSpec s = load_model("example1.dpp");
    const LevelCores lc = levelwise_cores(s, std::nullopt);
    REQUIRE(lc.stabilized_at);
    CHECK(*lc.stabilized_at <= 2);
    REQUIRE(lc.levels.size() >= 2);
    CHECK(with_head(s, lc.levels[1], "q") == words(s, {"spawn(q) w(g0,#)", "spawn(q)"}));
    // Child words: one level up, a child still sees no grandchildren, so its
    // core is the minimal ext words of its own runs.
    const auto child =
        enumerate_ext_words(s, StateId{*s.find_control("p"), {}}, ExploreBounds{0, 1, 40, 6, 2'000'000}, 6);
    CHECK(with_head(s, lc.levels[1], "p") == brute_core(child));
    SUBCASE("level 0 is the core under the base hypothesis") {
        std::set<ExtWord> k0;
        for (const StateId& p : heads_of(s)) {
            const auto c = compute_core_K(s, Hypothesis(base_hypothesis(s)), p);
            k0.insert(c.begin(), c.end());
        }
        CHECK(lc.levels[0] == k0);
    }
}

TEST_CASE("every enumerated behaviour dominates a level core word") {
    Rng rng(5);
    int compared = 0;
    for (int n = 0; n < 20; ++n) {
        const ProcessSpec s = random_spec(rng, small_params());
        try {
            const LevelCores lc = levelwise_cores(s, 1, false, quick_caps());
            for (std::size_t k = 0; k < lc.levels.size() && k < 2; ++k) {
                CHECK(core_of(lc.levels[k]) == lc.levels[k]);
                for (const ExtWord& w : bounded_ext(s, k, 3)) {
                    const bool dominated = std::any_of(lc.levels[k].begin(), lc.levels[k].end(),
                                                       [&](const ExtWord& u) { return lift_member(u, w); });
                    CHECK_MESSAGE(dominated, format_word(s, w));
                }
            }
            ++compared;
        } catch (const ResourceExceeded&) {
        }
    }
    CHECK(compared >= 15);
}

TEST_CASE("generalized futures") {
    SUBCASE("signatures of example 2 one level up") {
        const ProcessSpec s = load_model("example2.dpp");
        const LevelCores lc = levelwise_signatures(s, 1);
        REQUIRE(lc.levels.size() >= 2);
        CHECK(with_head(s, lc.levels[1], "p") ==
              prefix_closure(words(s, {"spawn(p) i(x,0) o(x,1)", "spawn(p) i(x,1) o(x,2)", "spawn(p) i(x,1) o(x,0)"})));
    }
    SUBCASE("own-local writes are outside the fragment") {
        const ProcessSpec s = parse_process(R"(kind finite
values 0 1 #
init_value 0
target #
locals x
init q
rules
q --spawn(p)--> q
p --w(x,1)--> p
)");
        CHECK_THROWS_AS(solve_gen_futures(s), FragmentMismatch);
        CHECK_THROWS_AS(solve_simple_futures(s), FragmentMismatch);
    }
}

TEST_CASE("simple futures on encoded formulas") {
    SUBCASE("satisfiable") {
        const ProcessSpec s = encode_sat(Cnf{2, {{1, 2}, {-1}}});
        CHECK(classify(s).simple_futures);
        CHECK(classify(s).proviso_ok);
        CHECK(solve_simple_futures(s).kind == VerdictKind::reachable);
    }
    SUBCASE("unsatisfiable") {
        const ProcessSpec s = encode_sat(Cnf{1, {{1}, {-1}}});
        CHECK(solve_simple_futures(s).kind == VerdictKind::unreachable);
    }
    SUBCASE("random formulas") {
        Rng rng(11);
        for (int n = 0; n < 10; ++n) {
            const Cnf cnf = random_3cnf(rng, 3, 4);
            const bool sat = brute_force_sat(cnf);
            CHECK((solve_simple_futures(encode_sat(cnf), quick_caps()).kind == VerdictKind::reachable) == sat);
        }
    }
}

TEST_CASE("fragment solvers agree with the general procedure") {
    Rng rng(21);
    for (Fragment f : {Fragment::gen_futures, Fragment::simple_futures}) {
        for (int n = 0; n < 10; ++n) {
            const ProcessSpec s = random_spec(rng, small_params(f));
            const Verdict g = solve(s, Algorithm::general, quick_caps());
            const Verdict v = solve(s, f == Fragment::gen_futures ? Algorithm::gen_futures : Algorithm::simple_futures,
                                    quick_caps());
            CHECK_MESSAGE(g.kind == v.kind, to_text(s));
        }
    }
    for (int n = 0; n < 10; ++n) {
        const ProcessSpec s = random_spec(rng, small_params(Fragment::no_locals));
        const Verdict g = solve(s, Algorithm::general, quick_caps());
        const Verdict v = solve(s, Algorithm::flatten, quick_caps());
        CHECK_MESSAGE(g.kind == v.kind, to_text(s));
    }
}

TEST_CASE("automatic selection") {
    CHECK(select_algorithm(load_model("example1.dpp")) == Algorithm::general);
    CHECK(select_algorithm(encode_sat(Cnf{1, {{1}}})) == Algorithm::simple_futures);
    CHECK(select_algorithm(parse_process(kExample1Global)) == Algorithm::flatten);
    CHECK(parse_algorithm("gen-futures") == Algorithm::gen_futures);
    CHECK(!parse_algorithm("fast"));
}

TEST_CASE("flattening") {
    SUBCASE("no spawns leaves only the scaffold") {
        const ProcessSpec s = parse_process(R"(kind finite
values 0 #
init_value 0
target #
globals g
init q
rules
q --w(g,#)--> q1
)");
        const ProcessSpec f = flatten(s);
        CHECK(rule_strings(f) == std::set<std::string>{"q --w(g,#)--> q1", "init_sp --spawn(wake_sp)--> q"});
        CHECK(solve_general(f).kind == solve_general(s).kind);
    }
    SUBCASE("a spawn becomes a write") {
        const ProcessSpec s = parse_process(R"(kind finite
values 0 #
init_value 0
target #
globals g
init q
rules
q --spawn(p)--> q1
)");
        const ProcessSpec f = flatten(s);
        CHECK(rule_strings(f) == std::set<std::string>{"q --w(g_sp,sp_p)--> q1", "init_sp --spawn(wake_sp)--> q",
                                                       "wake_sp --r(g_sp,sp_p)--> p"});
        CHECK(f.controls[f.init.control] == "init_sp");
        CHECK(classify(f).no_locals);
    }
    SUBCASE("locals are refused") {
        CHECK_THROWS_AS(flatten(load_model("example1.dpp")), FragmentMismatch);
    }
    SUBCASE("verdicts are kept") {
        // Flattened cores range over interleavings of global actions and grow
        // quickly, so capped runs are skipped.
        SolverCaps caps = quick_caps();
        caps.core.max_iterations = 150;
        Rng rng(31);
        int compared = 0;
        for (int n = 0; n < 15; ++n) {
            const ProcessSpec s = random_spec(rng, small_params(Fragment::no_locals));
            const auto expected = solve(s, Algorithm::general, quick_caps()).kind;
            REQUIRE(expected != VerdictKind::resource_exceeded);
            const auto flat = solve(flatten(s), Algorithm::general, caps).kind;
            const auto all = solve(flatten(s, {true}), Algorithm::general, caps).kind;
            if (flat == VerdictKind::resource_exceeded || all == VerdictKind::resource_exceeded) {
                continue;
            }
            CHECK_MESSAGE(flat == expected, to_text(s));
            CHECK(all == expected);
            ++compared;
        }
        CHECK(compared >= 10);
    }
}

TEST_CASE("leader and contributor export") {
    const ProcessSpec s = parse_process(kExample1Global);
    const ProcessSpec f = flatten(s);
    const CdSystem cd = export_cd_system(f);
    CHECK(cd.leader.controls[cd.leader.init.control] == "q");
    CHECK(cd.contributor.controls[cd.contributor.init.control] == "wake_sp");
    const CdSystem back = parse_cd(to_text(cd));
    CHECK(to_text(back.leader) == to_text(cd.leader));
    CHECK(to_text(back.contributor) == to_text(cd.contributor));
    const auto expected = solve_general(s).kind;
    CHECK(expected == VerdictKind::reachable);
    CHECK(solve_general(import_cd(back)).kind == expected);
    CHECK_THROWS_AS(export_cd_system(load_model("example2.dpp")), NotFlat);
    CHECK_THROWS_AS(export_cd_system(small_spec()), NotFlat);
    CHECK_THROWS_AS(export_cd_system(load_model("empty.dpp")), NotFlat);
}

TEST_CASE("reports") {
    const ProcessSpec s = load_model("example1.dpp");
    const Verdict v = solve_general(s);
    const auto doc = nlohmann::json::parse(report_json(s, v, true));
    CHECK(doc["verdict"] == "Reachable");
    CHECK(doc["algorithm"] == "general");
    CHECK(doc["witness"] == "spawn(q) w(g0,#)");
    CHECK(doc["trace"].size() == v.concrete->run.size());
    const std::string text = report_text(s, v);
    CHECK(text.rfind("Reachable", 0) == 0);
    CHECK(text.find("w(g0,#)") != std::string::npos);
    const Verdict u = solve_general(load_model("empty.dpp"));
    CHECK(nlohmann::json::parse(report_json(load_model("empty.dpp"), u))["witness"].is_null());
}

TEST_CASE("resource caps") {
    SolverCaps caps;
    caps.core.max_iterations = 1;
    const Verdict v = solve(load_model("example1.dpp"), Algorithm::general, caps);
    CHECK(v.kind == VerdictKind::resource_exceeded);
    CHECK(!v.detail.empty());
}
