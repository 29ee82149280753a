#include "dpp/words.hpp"

#include <algorithm>

namespace dpp {

std::vector<Action> Decomposition::recompose() const {
    std::vector<Action> out(blocks.at(0).begin(), blocks.at(0).end());
    for (std::size_t i = 0; i < letters.size(); ++i) {
        out.push_back(letters[i]);
        out.insert(out.end(), blocks.at(i + 1).begin(), blocks.at(i + 1).end());
    }
    return out;
}

std::vector<Action> sig(const std::vector<Action>& body) {
    std::vector<Action> out;
    for (const auto& a : body) {
        if (std::find(out.begin(), out.end(), a) == out.end()) {
            out.push_back(a);
        }
    }
    return out;
}

ExtWord sig(const ExtWord& w) {
    return ExtWord{w.head, sig(w.body)};
}

Decomposition canonical_decomposition(const std::vector<Action>& body) {
    Decomposition d;
    d.blocks.emplace_back();
    for (const auto& a : body) {
        if (std::find(d.letters.begin(), d.letters.end(), a) == d.letters.end()) {
            d.letters.push_back(a);
            d.blocks.emplace_back();
        } else {
            d.blocks.back().push_back(a);
        }
    }
    return d;
}

bool is_subword(const std::vector<Action>& small, const std::vector<Action>& big) {
    std::size_t i = 0;
    for (std::size_t j = 0; j < big.size() && i < small.size(); ++j) {
        if (big[j] == small[i]) {
            ++i;
        }
    }
    return i == small.size();
}

bool preceq(const ExtWord& a, const ExtWord& b) {
    if (a.head != b.head || a.body.size() > b.body.size()) {
        return false;
    }
    Decomposition da = canonical_decomposition(a.body);
    Decomposition db = canonical_decomposition(b.body);
    if (da.letters != db.letters) {
        return false;
    }
    for (std::size_t i = 0; i < da.blocks.size(); ++i) {
        if (!is_subword(da.blocks[i], db.blocks[i])) {
            return false;
        }
    }
    return true;
}

std::set<ExtWord> core_of(const std::set<ExtWord>& words) {
    std::set<ExtWord> out;
    for (const auto& w : words) {
        bool minimal = true;
        for (const auto& o : words) {
            if (o.body.size() < w.body.size() && preceq(o, w)) {
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

namespace {

std::set<std::vector<Action>> subwords(const std::vector<Action>& w, std::size_t cap) {
    std::set<std::vector<Action>> out{{}};
    for (const auto& a : w) {
        std::set<std::vector<Action>> next = out;
        for (const auto& s : out) {
            auto t = s;
            t.push_back(a);
            next.insert(std::move(t));
        }
        out = std::move(next);
        if (out.size() > cap) {
            throw ResourceExceeded("candidate enumeration exceeded " + std::to_string(cap) + " words");
        }
    }
    return out;
}

}  // namespace

std::vector<ExtWord> minimal_candidates(const ExtWord& w, std::size_t cap) {
    Decomposition d = canonical_decomposition(w.body);
    std::vector<std::vector<std::vector<Action>>> choices;
    std::size_t total = 1;
    for (const auto& block : d.blocks) {
        auto subs = subwords(block, cap);
        choices.emplace_back(subs.begin(), subs.end());
        total *= choices.back().size();
        if (total > cap) {
            throw ResourceExceeded("candidate enumeration exceeded " + std::to_string(cap) + " words");
        }
    }
    std::vector<ExtWord> out;
    out.reserve(total);
    std::vector<std::size_t> idx(choices.size(), 0);
    while (true) {
        ExtWord c{w.head, {}};
        c.body.insert(c.body.end(), choices[0][idx[0]].begin(), choices[0][idx[0]].end());
        for (std::size_t i = 0; i < d.letters.size(); ++i) {
            c.body.push_back(d.letters[i]);
            const auto& part = choices[i + 1][idx[i + 1]];
            c.body.insert(c.body.end(), part.begin(), part.end());
        }
        out.push_back(std::move(c));
        std::size_t i = 0;
        while (i < idx.size() && ++idx[i] == choices[i].size()) {
            idx[i] = 0;
            ++i;
        }
        if (i == idx.size()) {
            break;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::set<ExtWord> prefix_closure(const std::set<ExtWord>& words) {
    std::set<ExtWord> out;
    for (const auto& w : words) {
        for (std::size_t n = 0; n <= w.body.size(); ++n) {
            out.insert(ExtWord{w.head, std::vector<Action>(w.body.begin(), w.body.begin() + static_cast<std::ptrdiff_t>(n))});
        }
    }
    return out;
}

std::set<ExtWord> out_of(const ExtWord& w) {
    std::set<ExtWord> out{ExtWord{w.head, {}}};
    for (const auto& a : w.body) {
        if (a.kind != ActionKind::output) {
            throw Error("out: word contains a non-output action");
        }
        out.insert(ExtWord{w.head, {a}});
    }
    return out;
}

}  // namespace dpp
