#include <algorithm>
#include <random>

#include <doctest.h>

#include "dpp/words.hpp"
#include "support.hpp"

using namespace dpp;
using namespace dpp::test;

namespace {

/// First occurrences, computed directly.
std::vector<Action> first_occurrences(const std::vector<Action>& w) {
    std::vector<Action> out;
    for (const Action& a : w) {
        if (std::find(out.begin(), out.end(), a) == out.end()) {
            out.push_back(a);
        }
    }
    return out;
}

/// A random lift of a: after each letter, insert letters already seen.
std::vector<Action> random_lift(std::mt19937_64& rng, const std::vector<Action>& a) {
    std::vector<Action> out;
    std::vector<Action> seen;
    for (const Action& x : a) {
        out.push_back(x);
        seen.push_back(x);
        for (std::size_t k = rng() % 3; k > 0; --k) {
            out.push_back(seen[rng() % seen.size()]);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("signatures") {
    const ProcessSpec s = load_model("example2.dpp");
    const ExtWord w = word(s, "spawn(p) i(x,0) o(x,1)");
    CHECK(sig(w) == w);
    const ProcessSpec t = small_spec();
    CHECK(sig(word(t, "spawn(p) i(x,1) o(x,2) i(x,1) w(g,1) o(x,2)")) == word(t, "spawn(p) i(x,1) o(x,2) w(g,1)"));
    std::mt19937_64 rng(1);
    for (int n = 0; n < 500; ++n) {
        const auto b = random_body(rng, t, 8);
        CHECK(sig(sig(b)) == sig(b));
        CHECK(sig(b) == first_occurrences(b));
    }
}

TEST_CASE("canonical decomposition") {
    const ProcessSpec t = small_spec();
    const Action a = word(t, "i(x,1)").body[0];
    const Action b = word(t, "o(x,2)").body[0];
    SUBCASE("empty word") {
        const Decomposition d = canonical_decomposition({});
        CHECK(d.letters.empty());
        CHECK(d.recompose().empty());
    }
    SUBCASE("a a b") {
        const Decomposition d = canonical_decomposition({a, a, b});
        CHECK(d.letters == std::vector<Action>{a, b});
        REQUIRE(d.blocks.size() == 3);
        CHECK(d.blocks[1] == std::vector<Action>{a});
        CHECK(d.blocks[2].empty());
    }
    SUBCASE("a b a b") {
        const Decomposition d = canonical_decomposition({a, b, a, b});
        CHECK(d.letters == std::vector<Action>{a, b});
        CHECK(d.blocks.back() == std::vector<Action>{a, b});
        CHECK(d.recompose() == std::vector<Action>{a, b, a, b});
    }
    SUBCASE("round trip and block alphabet") {
        std::mt19937_64 rng(2);
        for (int n = 0; n < 200; ++n) {
            const auto w = random_body(rng, t, 9);
            const Decomposition d = canonical_decomposition(w);
            CHECK(d.recompose() == w);
            CHECK(d.letters == first_occurrences(w));
            for (std::size_t i = 1; i < d.blocks.size(); ++i) {
                for (const Action& x : d.blocks[i]) {
                    CHECK(std::find(d.letters.begin(), d.letters.begin() + static_cast<std::ptrdiff_t>(i), x) !=
                          d.letters.begin() + static_cast<std::ptrdiff_t>(i));
                }
            }
        }
    }
}

TEST_CASE("lift order") {
    const ProcessSpec t = small_spec();
    CHECK(preceq(word(t, "spawn(p) i(x,1)"), word(t, "spawn(p) i(x,1) i(x,1)")));
    CHECK_FALSE(preceq(word(t, "spawn(p) i(x,1)"), word(t, "spawn(p) i(x,1) o(x,2)")));
    CHECK_FALSE(preceq(word(t, "spawn(p) i(x,1)"), word(t, "spawn(q) i(x,1)")));
    CHECK(preceq(word(t, "spawn(p)"), word(t, "spawn(p)")));

    std::mt19937_64 rng(3);
    const StateId p{*t.find_control("p"), {}};
    for (int n = 0; n < 1000; ++n) {
        const ExtWord a{p, random_body(rng, t, 6)};
        const ExtWord b{p, random_lift(rng, a.body)};
        CHECK(preceq(a, b));
        CHECK(sig(a) == sig(b));
        const ExtWord c{p, random_body(rng, t, 6)};
        CHECK(preceq(a, c) == lift_member(a, c));
        CHECK(preceq(c, b) == lift_member(c, b));
    }
}

TEST_CASE("order laws") {
    const ProcessSpec t = small_spec();
    const StateId p{*t.find_control("p"), {}};
    std::mt19937_64 rng(4);
    for (int n = 0; n < 1000; ++n) {
        const ExtWord a{p, random_body(rng, t, 6)};
        const ExtWord b{p, random_lift(rng, a.body)};
        const ExtWord c{p, random_lift(rng, b.body)};
        CHECK(preceq(a, a));
        CHECK(preceq(sig(a), a));
        CHECK(preceq(a, c));
        if (preceq(a, b) && preceq(b, a)) {
            CHECK(a == b);
        }
    }
}

TEST_CASE("cores") {
    const ProcessSpec t = small_spec();
    const auto one = words(t, {"spawn(p) i(x,1)"});
    CHECK(core_of(one) == one);
    CHECK(core_of(words(t, {"spawn(p) i(x,1)", "spawn(p) i(x,1) i(x,1)"})) == one);

    const StateId p{*t.find_control("p"), {}};
    const StateId q{*t.find_control("q"), {}};
    std::mt19937_64 rng(5);
    for (int n = 0; n < 1000; ++n) {
        std::set<ExtWord> xs;
        for (std::size_t k = rng() % 8; k > 0; --k) {
            const ExtWord base{rng() % 4 ? p : q, random_body(rng, t, 4, 2)};
            xs.insert(base);
            if (rng() % 2) {
                xs.insert(ExtWord{base.head, random_lift(rng, base.body)});
            }
        }
        const auto c = core_of(xs);
        CHECK(c == brute_core(xs));
        CHECK(core_of(c) == c);
        for (const ExtWord& x : c) {
            for (const ExtWord& y : c) {
                if (x != y) {
                    CHECK_FALSE(preceq(x, y));
                }
            }
        }
    }
}

TEST_CASE("minimal candidates") {
    const ProcessSpec t = small_spec();
    const StateId p{*t.find_control("p"), {}};
    SUBCASE("a signature has only itself") {
        const ExtWord w = word(t, "spawn(p) i(x,1) o(x,2)");
        CHECK(minimal_candidates(w) == std::vector<ExtWord>{w});
    }
    SUBCASE("a a") {
        const ExtWord w = word(t, "spawn(p) i(x,1) i(x,1)");
        CHECK(minimal_candidates(w) == std::vector<ExtWord>{word(t, "spawn(p) i(x,1)"), w});
    }
    SUBCASE("brute force over subsequences") {
        std::mt19937_64 rng(6);
        for (int n = 0; n < 30; ++n) {
            const ExtWord w{p, random_body(rng, t, 9)};
            std::set<ExtWord> below;
            for (const auto& s : subsequences(w.body)) {
                if (lift_member(s, w.body)) {
                    below.insert(ExtWord{p, s});
                }
            }
            const auto got = minimal_candidates(w);
            CHECK(got.size() == below.size());
            CHECK(std::set<ExtWord>(got.begin(), got.end()) == below);
            CHECK(std::is_sorted(got.begin(), got.end(), [](const ExtWord& a, const ExtWord& b) {
                return a.body.size() != b.body.size() ? a.body.size() < b.body.size() : a.body < b.body;
            }));
        }
    }
    SUBCASE("cap") {
        std::vector<Action> body;
        for (int i = 0; i < 30; ++i) {
            body.push_back(word(t, i % 2 ? "i(x,1)" : "o(x,2)").body[0]);
        }
        CHECK_THROWS_AS(minimal_candidates(ExtWord{p, body}, 100), ResourceExceeded);
    }
}

TEST_CASE("prefix closure") {
    const ProcessSpec t = small_spec();
    CHECK(prefix_closure(words(t, {"spawn(p) i(x,1) o(x,2)"})) ==
          words(t, {"spawn(p)", "spawn(p) i(x,1)", "spawn(p) i(x,1) o(x,2)"}));
}

TEST_CASE("out sets") {
    const ProcessSpec t = small_spec();
    CHECK(out_of(word(t, "spawn(p)")) == words(t, {"spawn(p)"}));
    CHECK(out_of(word(t, "spawn(p) o(x,1) o(x,2) o(x,1)")) ==
          words(t, {"spawn(p)", "spawn(p) o(x,1)", "spawn(p) o(x,2)"}));
    CHECK_THROWS_AS(out_of(word(t, "spawn(p) i(x,1)")), Error);
    std::mt19937_64 rng(7);
    const ExtWord w = word(t, "spawn(p) o(x,1) o(x,2) o(x,0) o(x,2)");
    for (int n = 0; n < 20; ++n) {
        ExtWord v = w;
        std::shuffle(v.body.begin(), v.body.end(), rng);
        CHECK(out_of(v) == out_of(w));
    }
}
