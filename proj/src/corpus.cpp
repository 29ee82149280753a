#include "dpp/corpus.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace dpp {

namespace {

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool chance(Rng& rng, double p) {
    return std::bernoulli_distribution(p)(rng);
}

LabelText var_label(LabelKind k, const std::string& var, const std::string& value) {
    LabelText t;
    t.kind = k;
    t.var = var;
    t.value = value;
    return t;
}

}  // namespace

ProcessSpec random_spec(Rng& rng, const RandomSpecParams& params) {
    const Fragment f = params.fragment;
    const bool futures = f == Fragment::gen_futures || f == Fragment::simple_futures;
    const std::size_t nvalues = pick(rng, 2, std::max<std::size_t>(2, params.max_values));
    std::vector<std::string> values{"0"};
    for (std::size_t i = 1; i + 1 < nvalues; ++i) {
        values.push_back(std::to_string(i));
    }
    values.push_back("#");
    // Futures fragments need a non-initial, non-target value to talk about.
    if (futures && values.size() < 3) {
        values.insert(values.end() - 1, "1");
    }
    std::vector<std::string> locals;
    std::vector<std::string> globals;
    if (f != Fragment::no_locals) {
        std::size_t n = futures ? std::max<std::size_t>(1, params.max_locals) : pick(rng, 0, params.max_locals);
        for (std::size_t i = 0; i < n; ++i) {
            locals.push_back(i ? "x" + std::to_string(i) : "x");
        }
    }
    if (!futures) {
        std::size_t n = f == Fragment::no_locals ? std::max<std::size_t>(1, params.max_globals)
                                                 : pick(rng, 0, params.max_globals);
        for (std::size_t i = 0; i < n; ++i) {
            globals.push_back(i ? "g" + std::to_string(i) : "g");
        }
    }
    const std::size_t ncontrols = pick(rng, 2, std::max<std::size_t>(2, params.max_controls));
    std::vector<std::string> controls;
    for (std::size_t i = 0; i < ncontrols; ++i) {
        controls.push_back("q" + std::to_string(i));
    }

    // Values usable by external actions.
    std::vector<std::string> ext_values(values.begin() + (futures ? 1 : 0), values.end());
    auto any_value = [&]() { return values[pick(rng, 0, values.size() - 1)]; };
    auto ext_value = [&](bool producing) {
        if (producing && chance(rng, params.target_bias)) {
            return std::string("#");
        }
        return ext_values[pick(rng, 0, ext_values.size() - 1)];
    };

    enum Choice { tau, read_local, write_local, input, output, read_global, write_global, spawn };
    std::vector<Choice> choices{tau, spawn};
    if (!locals.empty()) {
        choices.push_back(read_local);
        choices.push_back(input);
        choices.push_back(output);
        if (!futures) {
            choices.push_back(write_local);
        }
        if (f == Fragment::simple_futures) {
            choices.erase(std::find(choices.begin(), choices.end(), input));
        }
    }
    if (!globals.empty()) {
        choices.push_back(read_global);
        choices.push_back(write_global);
    }

    SpecBuilder b;
    b.values(values).init_value("0").target("#").locals(locals).globals(globals).states(controls).init("q0");
    const std::size_t nrules = pick(rng, 1, std::max<std::size_t>(1, params.max_rules));
    for (std::size_t i = 0; i < nrules; ++i) {
        RuleText r;
        r.from = i == 0 ? "q0" : controls[pick(rng, 0, ncontrols - 1)];
        r.to = controls[pick(rng, 0, ncontrols - 1)];
        const std::string x = locals.empty() ? "" : locals[pick(rng, 0, locals.size() - 1)];
        const std::string g = globals.empty() ? "" : globals[pick(rng, 0, globals.size() - 1)];
        switch (choices[pick(rng, 0, choices.size() - 1)]) {
            case tau:
                break;
            case read_local:
                r.label = var_label(LabelKind::read, x, futures ? ext_value(false) : any_value());
                break;
            case write_local:
                r.label = var_label(LabelKind::write, x, any_value());
                break;
            case input:
                r.label = var_label(LabelKind::input, x, ext_value(false));
                break;
            case output:
                r.label = var_label(LabelKind::output, x, ext_value(true));
                break;
            case read_global:
                r.label = var_label(LabelKind::read, g, any_value());
                break;
            case write_global:
                r.label = var_label(LabelKind::write, g, chance(rng, params.target_bias) ? "#" : any_value());
                break;
            case spawn:
                r.label.kind = LabelKind::spawn;
                r.label.target_control = controls[pick(rng, 0, ncontrols - 1)];
                break;
        }
        b.rule(std::move(r));
    }
    return b.build();
}

// --- pushdown systems ----------------------------------------------------------------------

PdsInstance random_pds(Rng& rng, const RandomPdsParams& params) {
    PdsInstance inst;
    Pds& p = inst.pds;
    p.num_controls = pick(rng, 1, params.max_controls);
    p.num_symbols = pick(rng, 1, params.max_symbols);
    for (std::size_t i = 0; i < params.letters; ++i) {
        p.alphabet.push_back(ActionLabel::read(0, static_cast<ValueId>(i)));
    }
    p.accepting.assign(p.num_controls, false);
    for (std::size_t c = 0; c < p.num_controls; ++c) {
        p.accepting[c] = chance(rng, 0.35);
    }
    const std::size_t nrules = pick(rng, 1, params.max_rules);
    for (std::size_t i = 0; i < nrules; ++i) {
        PdsRule r;
        r.from = static_cast<ControlId>(pick(rng, 0, p.num_controls - 1));
        r.to = static_cast<ControlId>(pick(rng, 0, p.num_controls - 1));
        if (chance(rng, 0.7)) {
            r.pop = static_cast<SymbolId>(pick(rng, 0, p.num_symbols - 1));
        }
        const std::size_t npush = pick(rng, 0, params.max_push);
        for (std::size_t k = 0; k < npush; ++k) {
            r.push.push_back(static_cast<SymbolId>(pick(rng, 0, p.num_symbols - 1)));
        }
        r.label = p.alphabet[pick(rng, 0, p.alphabet.size() - 1)];
        r.id = static_cast<std::int64_t>(i);
        p.rules.push_back(std::move(r));
    }
    inst.start = StateId{0, {static_cast<SymbolId>(pick(rng, 0, p.num_symbols - 1))}};
    return inst;
}

FiniteAutomaton random_automaton(Rng& rng, const std::vector<ActionLabel>& letters, std::size_t states) {
    FiniteAutomaton fa(states, letters);
    fa.set_initial(0);
    for (std::size_t s = 0; s < states; ++s) {
        fa.set_accepting(static_cast<FState>(s), chance(rng, 0.5));
        if (s > 0) {
            auto from = static_cast<FState>(pick(rng, 0, s - 1));
            fa.add_transition(from, letters[pick(rng, 0, letters.size() - 1)], static_cast<FState>(s));
        }
    }
    const std::size_t extra = pick(rng, 0, 2 * states);
    for (std::size_t i = 0; i < extra; ++i) {
        fa.add_transition(static_cast<FState>(pick(rng, 0, states - 1)), letters[pick(rng, 0, letters.size() - 1)],
                          static_cast<FState>(pick(rng, 0, states - 1)));
    }
    return fa;
}

std::optional<Witness> bounded_search(const Pds& pds, const StateId& start, std::size_t max_height,
                                      FiniteView* view) {
    struct Node {
        StateId config;
        FState f;
        std::int64_t parent;
        std::size_t rule;
    };
    UniversalView universal;
    FiniteView& v = view ? *view : universal;
    std::vector<Node> nodes;
    std::map<std::pair<StateId, FState>, std::size_t> seen;
    auto done = [&](const Node& n) { return pds.accepting.at(n.config.control) && v.accepting(n.f); };
    auto build = [&](std::size_t n) {
        Witness w;
        while (nodes[n].parent >= 0) {
            w.labels.push_back(pds.rules[nodes[n].rule].label);
            w.rule_trace.push_back(pds.rules[nodes[n].rule].id);
            n = static_cast<std::size_t>(nodes[n].parent);
        }
        std::reverse(w.labels.begin(), w.labels.end());
        std::reverse(w.rule_trace.begin(), w.rule_trace.end());
        return w;
    };
    if (start.stack.size() > max_height) {
        return std::nullopt;
    }
    nodes.push_back({start, v.initial(), -1, 0});
    seen.emplace(std::make_pair(start, nodes[0].f), 0);
    if (done(nodes[0])) {
        return Witness{};
    }
    std::vector<FState> succ;
    for (std::size_t head = 0; head < nodes.size(); ++head) {
        for (std::size_t ri = 0; ri < pds.rules.size(); ++ri) {
            const PdsRule& r = pds.rules[ri];
            const StateId cur = nodes[head].config;
            if (r.from != cur.control) {
                continue;
            }
            std::size_t popped = 0;
            if (r.pop) {
                if (cur.stack.empty() || cur.stack.front() != *r.pop) {
                    continue;
                }
                popped = 1;
            }
            StateId next{r.to, r.push};
            next.stack.insert(next.stack.end(), cur.stack.begin() + static_cast<std::ptrdiff_t>(popped),
                              cur.stack.end());
            if (next.stack.size() > max_height) {
                continue;
            }
            succ.clear();
            v.step(nodes[head].f, r.label, succ);
            for (FState f : succ) {
                if (!seen.emplace(std::make_pair(next, f), nodes.size()).second) {
                    continue;
                }
                nodes.push_back({next, f, static_cast<std::int64_t>(head), ri});
                if (done(nodes.back())) {
                    return build(nodes.size() - 1);
                }
            }
        }
    }
    return std::nullopt;
}

// --- CNF ------------------------------------------------------------------------------------

Cnf random_3cnf(Rng& rng, std::size_t max_vars, std::size_t max_clauses) {
    Cnf cnf;
    cnf.vars = pick(rng, 1, max_vars);
    const std::size_t m = pick(rng, 1, max_clauses);
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<int> clause;
        for (int k = 0; k < 3; ++k) {
            int v = static_cast<int>(pick(rng, 1, cnf.vars));
            clause.push_back(chance(rng, 0.5) ? v : -v);
        }
        cnf.clauses.push_back(std::move(clause));
    }
    return cnf;
}

bool brute_force_sat(const Cnf& cnf) {
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << cnf.vars); ++a) {
        bool all = true;
        for (const auto& clause : cnf.clauses) {
            bool sat = false;
            for (int lit : clause) {
                bool value = (a >> (std::abs(lit) - 1)) & 1;
                if ((lit > 0) == value) {
                    sat = true;
                    break;
                }
            }
            if (!sat) {
                all = false;
                break;
            }
        }
        if (all) {
            return true;
        }
    }
    return false;
}

Cnf parse_dimacs(std::string_view text) {
    Cnf cnf;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    std::vector<int> clause;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first) || first == "c") {
            continue;
        }
        if (first == "p") {
            std::string fmt;
            std::size_t m = 0;
            if (!(ls >> fmt >> cnf.vars >> m) || fmt != "cnf") {
                throw ParseError(line_no, 1, "expected 'p cnf <vars> <clauses>'");
            }
            header = true;
            continue;
        }
        if (!header) {
            throw ParseError(line_no, 1, "clause before the 'p cnf' header");
        }
        std::istringstream all(line);
        long lit = 0;
        while (all >> lit) {
            if (lit == 0) {
                if (clause.empty()) {
                    throw ParseError(line_no, 1, "empty clause");
                }
                cnf.clauses.push_back(std::move(clause));
                clause.clear();
                continue;
            }
            if (static_cast<std::size_t>(std::labs(lit)) > cnf.vars) {
                throw ParseError(line_no, 1, "literal out of range");
            }
            clause.push_back(static_cast<int>(lit));
        }
        if (!all.eof()) {
            throw ParseError(line_no, 1, "malformed literal");
        }
    }
    if (!clause.empty()) {
        cnf.clauses.push_back(std::move(clause));
    }
    if (!header) {
        throw ParseError(line_no, 1, "missing 'p cnf' header");
    }
    return cnf;
}

std::string to_dimacs(const Cnf& cnf) {
    std::ostringstream out;
    out << "p cnf " << cnf.vars << " " << cnf.clauses.size() << "\n";
    for (const auto& clause : cnf.clauses) {
        for (int lit : clause) {
            out << lit << " ";
        }
        out << "0\n";
    }
    return out.str();
}

ProcessSpec encode_sat(const Cnf& cnf) {
    const std::size_t n = cnf.vars;
    const std::size_t m = cnf.clauses.size();
    std::vector<std::string> values{"0", "#"};
    for (std::size_t j = 1; j <= m; ++j) {
        values.push_back("c" + std::to_string(j));
    }
    std::vector<std::string> controls{"end"};
    for (std::size_t i = 0; i <= n; ++i) {
        controls.push_back("r" + std::to_string(i));
    }
    for (std::size_t j = 1; j <= m; ++j) {
        controls.push_back("s" + std::to_string(j));
    }
    for (std::size_t i = 1; i <= n; ++i) {
        controls.push_back("t" + std::to_string(i));
        controls.push_back("f" + std::to_string(i));
    }
    SpecBuilder b;
    b.values(values).init_value("0").target("#").locals({"x"}).states(controls).init("r0");
    auto rule = [&](std::string from, LabelText label, std::string to) {
        RuleText r;
        r.from = std::move(from);
        r.label = std::move(label);
        r.to = std::move(to);
        b.rule(std::move(r));
    };
    auto spawn = [](std::string target) {
        LabelText t;
        t.kind = LabelKind::spawn;
        t.target_control = std::move(target);
        return t;
    };
    for (std::size_t i = 1; i <= n; ++i) {
        const std::string from = "r" + std::to_string(i - 1);
        const std::string to = "r" + std::to_string(i);
        rule(from, spawn("t" + std::to_string(i)), to);
        rule(from, spawn("f" + std::to_string(i)), to);
    }
    std::string at = "r" + std::to_string(n);
    std::set<std::pair<std::string, std::string>> emitted;
    for (std::size_t j = 1; j <= m; ++j) {
        const std::string c = "c" + std::to_string(j);
        rule(at, var_label(LabelKind::read, "x", c), "s" + std::to_string(j));
        at = "s" + std::to_string(j);
        for (int lit : cnf.clauses[j - 1]) {
            const std::string child = (lit > 0 ? "t" : "f") + std::to_string(std::abs(lit));
            if (!emitted.insert({child, c}).second) {
                continue;
            }
            rule(child, var_label(LabelKind::output, "x", c), child);
        }
    }
    rule(at, var_label(LabelKind::output, "x", "#"), "end");
    return b.build();
}

}  // namespace dpp
