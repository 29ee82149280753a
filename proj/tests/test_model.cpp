#include <algorithm>
#include <random>

#include <doctest.h>

#include "dpp/model.hpp"
#include "support.hpp"

using namespace dpp;
using namespace dpp::test;

TEST_CASE("example 1 parses to the nine edges of its figure") {
    const ProcessSpec s = load_model("example1.dpp");
    CHECK(s.rules.size() == 9);
    CHECK(s.kind == ProcessKind::finite);
    CHECK(s.values.size() == 5);
    CHECK(s.controls[s.init.control] == "q");
    CHECK(s.is_global(*s.find_variable("g0")));
    CHECK(s.is_local(*s.find_variable("x")));
    CHECK(s.spawn_targets.size() == 1);
}

TEST_CASE("empty rules section is valid") {
    const ProcessSpec s = load_model("empty.dpp");
    CHECK(s.rules.empty());
}

TEST_CASE("undeclared value is rejected") {
    CHECK_THROWS_AS(parse_process("kind finite\nvalues 0 #\ninit_value 0\ntarget #\nlocals x\ninit q\nrules\n"
                                  "q --o(x,9)--> q\n"),
                    ValidationError);
}

TEST_CASE("syntax errors carry positions") {
    try {
        parse_process("kind finite\nvalues 0 #\ninit_value 0\ntarget #\ninit q\nrules\nq --o(x 1)--> q\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 7);
        CHECK(e.column() > 0);
    } catch (const ValidationError&) {
        FAIL("expected a parse error");
    }
}

TEST_CASE("text round trip") {
    for (const char* name : {"example1.dpp", "example2.dpp", "example3.dpp", "empty.dpp"}) {
        const ProcessSpec s = load_model(name);
        const ProcessSpec t = parse_process(to_text(s));
        CHECK(to_text(t) == to_text(s));
        CHECK(t.rules.size() == s.rules.size());
    }
}

TEST_CASE("json documents are accepted") {
    const ProcessSpec s = parse_process(R"j({"kind":"finite","values":["0","1","#"],"init_value":"0","target":"#",
        "globals":["g"],"locals":[],"init":{"control":"q"},
        "rules":[{"from":"q","label":"w(g,#)","to":"q1"}]})j");
    CHECK(s.rules.size() == 1);
    CHECK(classify(s).no_locals);
}

TEST_CASE("classify") {
    SUBCASE("example 2 is generalized futures") {
        const FragmentTags t = classify(load_model("example2.dpp"));
        CHECK(t.generalized_futures);
        CHECK_FALSE(t.simple_futures);
        CHECK_FALSE(t.no_locals);
    }
    SUBCASE("no locals") {
        const ProcessSpec s = parse_process(
            "kind finite\nvalues 0 #\ninit_value 0\ntarget #\nglobals g\ninit q\nrules\nq --w(g,#)--> q\n");
        CHECK(classify(s).no_locals);
    }
    SUBCASE("reading the initial value breaks the proviso") {
        const ProcessSpec s = parse_process("kind finite\nvalues 0 1 #\ninit_value 0\ntarget #\nlocals x\ninit q\n"
                                            "rules\nq --r(x,0)--> q\n");
        CHECK_FALSE(classify(s).proviso_ok);
    }
    SUBCASE("independent of rule order") {
        const ProcessSpec s = load_model("example2.dpp");
        std::string text = to_text(s);
        const auto at = text.find("rules\n") + 6;
        std::vector<std::string> lines;
        std::string rest = text.substr(at);
        for (std::size_t p; (p = rest.find('\n')) != std::string::npos; rest = rest.substr(p + 1)) {
            lines.push_back(rest.substr(0, p));
        }
        std::reverse(lines.begin(), lines.end());
        std::string reordered = text.substr(0, at);
        for (const auto& l : lines) {
            reordered += l + "\n";
        }
        CHECK(classify(parse_process(reordered)) == classify(s));
    }
}

TEST_CASE("ext projection") {
    const ProcessSpec s = load_model("example1.dpp");
    CHECK(ext_project(s, labels(s, {"tau", "w(x,1)", "rbar(x,1)", "wbar(x,2)"})).empty());
    const auto w = ext_project(s, labels(s, {"w(g0,#)"}));
    REQUIRE(w.size() == 1);
    CHECK(format_action(s, w[0]) == "w(g0,#)");

    const ProcessSpec t = small_spec();
    const auto e = ext_project(t, labels(t, {"rbar(g,1)", "i(x,0)", "spawn(p)"}));
    REQUIRE(e.size() == 2);
    CHECK(format_action(t, e[0]) == "r(g,1)");
    CHECK(format_action(t, e[1]) == "i(x,0)");
}

TEST_CASE("filter projection") {
    const ProcessSpec s = load_model("example1.dpp");
    CHECK(format_labels(s, filter_project(s, labels(s, {"wbar(x,2)"}))) == "o(x,2)");
    CHECK(filter_project(s, labels(s, {"tau", "r(x,1)", "w(x,1)"})).empty());
    const ProcessSpec t = small_spec();
    CHECK(format_labels(t, filter_project(t, labels(t, {"spawn(p)", "rbar(g,0)"}))) == "spawn(p) r(g,0)");
}

TEST_CASE("projection laws on random words") {
    const ProcessSpec s = small_spec();
    const std::vector<ActionLabel> alphabet = full_alphabet(s);
    std::mt19937_64 rng(11);
    auto random_word = [&] {
        Word w(rng() % 7);
        for (auto& a : w) {
            a = alphabet[rng() % alphabet.size()];
        }
        return w;
    };
    for (int n = 0; n < 300; ++n) {
        const Word a = random_word();
        const Word b = random_word();
        Word ab = a;
        ab.insert(ab.end(), b.begin(), b.end());

        auto ea = ext_project(s, a);
        const auto eb = ext_project(s, b);
        ea.insert(ea.end(), eb.begin(), eb.end());
        CHECK(ext_project(s, ab) == ea);

        Word fa = filter_project(s, a);
        const Word fb = filter_project(s, b);
        fa.insert(fa.end(), fb.begin(), fb.end());
        CHECK(filter_project(s, ab) == fa);

        std::vector<Action> expected;
        for (const ActionLabel& l : ab) {
            const bool barred = l.kind == LabelKind::bar_read || l.kind == LabelKind::bar_write;
            if ((barred && s.is_global(l.var)) || l.kind == LabelKind::input || l.kind == LabelKind::output ||
                ((l.kind == LabelKind::read || l.kind == LabelKind::write) && s.is_global(l.var))) {
                const auto e = ext_of(s, l);
                REQUIRE(e);
                expected.push_back(*e);
            }
        }
        CHECK(ext_project(s, ab) == expected);
    }
}

TEST_CASE("ext words parse and print") {
    const ProcessSpec s = load_model("example1.dpp");
    const ExtWord w = word(s, "spawn(p) i(x,1) o(x,2)");
    CHECK(format_word(s, w) == "spawn(p) i(x,1) o(x,2)");
    CHECK(w.body.size() == 2);
    CHECK(word(s, "spawn(q)").body.empty());
}
