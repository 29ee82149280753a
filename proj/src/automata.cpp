#include "dpp/automata.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace dpp {

std::uint64_t label_key(const ActionLabel& a) {
    return (static_cast<std::uint64_t>(a.kind) << 56) | (static_cast<std::uint64_t>(a.var) << 40) |
           (static_cast<std::uint64_t>(a.value) << 24) | static_cast<std::uint64_t>(a.target);
}

// --- FiniteAutomaton -------------------------------------------------------------

FiniteAutomaton::FiniteAutomaton(std::size_t states, std::vector<ActionLabel> alphabet)
    : alphabet_(std::move(alphabet)) {
    std::sort(alphabet_.begin(), alphabet_.end());
    alphabet_.erase(std::unique(alphabet_.begin(), alphabet_.end()), alphabet_.end());
    for (std::size_t i = 0; i < states; ++i) {
        add_state(false);
    }
}

FState FiniteAutomaton::add_state(bool accepting) {
    accepting_.push_back(accepting);
    edges_.emplace_back();
    index_.emplace_back();
    return static_cast<FState>(accepting_.size() - 1);
}

bool FiniteAutomaton::in_alphabet(const ActionLabel& a) const {
    return std::binary_search(alphabet_.begin(), alphabet_.end(), a);
}

void FiniteAutomaton::add_transition(FState from, const ActionLabel& a, FState to) {
    if (!in_alphabet(a)) {
        throw AlphabetError("transition label outside the alphabet");
    }
    if (from >= num_states() || to >= num_states()) {
        throw Error("transition references an undeclared state");
    }
    auto& targets = index_[from][label_key(a)];
    if (std::find(targets.begin(), targets.end(), to) != targets.end()) {
        return;
    }
    targets.push_back(to);
    edges_[from].push_back({a, to});
}

void FiniteAutomaton::step(FState s, const ActionLabel& a, std::vector<FState>& out) {
    const auto& idx = index_.at(s);
    auto it = idx.find(label_key(a));
    if (it != idx.end()) {
        out.insert(out.end(), it->second.begin(), it->second.end());
    }
}

bool FiniteAutomaton::accepts(const std::vector<ActionLabel>& word) const {
    std::set<FState> current{initial_};
    for (const auto& a : word) {
        std::set<FState> next;
        for (FState s : current) {
            auto it = index_[s].find(label_key(a));
            if (it != index_[s].end()) {
                next.insert(it->second.begin(), it->second.end());
            }
        }
        current = std::move(next);
        if (current.empty()) {
            return false;
        }
    }
    return std::any_of(current.begin(), current.end(), [&](FState s) { return accepting_[s]; });
}

// --- ProductView -------------------------------------------------------------------

ProductView::ProductView(std::vector<std::shared_ptr<FiniteView>> parts)
    : parts_(std::move(parts)), scratch_(parts_.size()) {}

FState ProductView::intern(const std::vector<FState>& tuple) {
    auto [it, inserted] = ids_.emplace(tuple, static_cast<FState>(states_.size()));
    if (inserted) {
        states_.push_back(tuple);
    }
    return it->second;
}

FState ProductView::initial() {
    std::vector<FState> tuple;
    for (auto& p : parts_) {
        tuple.push_back(p->initial());
    }
    return intern(tuple);
}

bool ProductView::accepting(FState s) {
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (!parts_[i]->accepting(states_[s][i])) {
            return false;
        }
    }
    return true;
}

void ProductView::step(FState s, const ActionLabel& a, std::vector<FState>& out) {
    // Interning may reallocate states_, so work on a copy of the tuple.
    tuple_ = states_[s];
    bool deterministic = true;
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        scratch_[i].clear();
        parts_[i]->step(tuple_[i], a, scratch_[i]);
        if (scratch_[i].empty()) {
            return;
        }
        deterministic = deterministic && scratch_[i].size() == 1;
    }
    if (deterministic) {
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            tuple_[i] = scratch_[i][0];
        }
        out.push_back(intern(tuple_));
        return;
    }
    std::vector<std::size_t> idx(parts_.size(), 0);
    while (true) {
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            tuple_[i] = scratch_[i][idx[i]];
        }
        out.push_back(intern(tuple_));
        std::size_t i = 0;
        while (i < parts_.size() && ++idx[i] == scratch_[i].size()) {
            idx[i] = 0;
            ++i;
        }
        if (i == parts_.size()) {
            break;
        }
    }
}

std::string ProductView::describe(FState s) {
    std::string out = "(";
    const auto& tuple = states_.at(s);
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (i) {
            out += ", ";
        }
        out += parts_[i]->describe(tuple[i]);
    }
    return out + ")";
}

// --- pushdown systems ------------------------------------------------------------------

bool Pds::is_finite() const {
    return std::all_of(rules.begin(), rules.end(),
                       [](const PdsRule& r) { return !r.pop && r.push.empty(); });
}

Pds associated_automaton(const ProcessSpec& spec) {
    Pds pds;
    pds.num_controls = spec.controls.size();
    pds.num_symbols = spec.stack_symbols.size();
    pds.alphabet = rule_alphabet(spec);
    pds.accepting.assign(pds.num_controls, true);
    for (std::size_t i = 0; i < spec.rules.size(); ++i) {
        const Rule& r = spec.rules[i];
        pds.rules.push_back({r.from, r.pop, r.label, r.to, r.push, static_cast<std::int64_t>(i)});
    }
    return pds;
}

Pds alphabet_extend(const Pds& pds, const std::vector<ActionLabel>& extra) {
    std::set<ActionLabel> existing(pds.alphabet.begin(), pds.alphabet.end());
    for (const auto& a : extra) {
        if (existing.count(a)) {
            throw AlphabetError("alphabet extension overlaps the existing alphabet");
        }
    }
    Pds out = pds;
    std::set<ActionLabel> letters(extra.begin(), extra.end());
    for (ControlId c = 0; c < pds.num_controls; ++c) {
        for (const auto& a : letters) {
            out.rules.push_back({c, std::nullopt, a, c, {}, -1});
        }
    }
    out.alphabet.insert(out.alphabet.end(), letters.begin(), letters.end());
    std::sort(out.alphabet.begin(), out.alphabet.end());
    return out;
}

FiniteAutomaton alphabet_extend(const FiniteAutomaton& fa, const std::vector<ActionLabel>& extra) {
    for (const auto& a : extra) {
        if (fa.in_alphabet(a)) {
            throw AlphabetError("alphabet extension overlaps the existing alphabet");
        }
    }
    std::vector<ActionLabel> alphabet = fa.alphabet();
    alphabet.insert(alphabet.end(), extra.begin(), extra.end());
    FiniteAutomaton out(fa.num_states(), alphabet);
    out.set_initial(fa.initial_state());
    for (FState s = 0; s < fa.num_states(); ++s) {
        out.set_accepting(s, fa.is_accepting(s));
        for (const auto& e : fa.edges(s)) {
            out.add_transition(s, e.label, e.to);
        }
        for (const auto& a : extra) {
            out.add_transition(s, a, s);
        }
    }
    return out;
}

FiniteAutomaton product_with_finite(const FiniteAutomaton& a, const FiniteAutomaton& b) {
    if (a.alphabet() != b.alphabet()) {
        throw AlphabetError("product of automata over different alphabets");
    }
    FiniteAutomaton out(0, a.alphabet());
    std::map<std::pair<FState, FState>, FState> ids;
    std::deque<std::pair<FState, FState>> work;
    auto intern = [&](FState x, FState y) {
        auto [it, inserted] = ids.emplace(std::make_pair(x, y), 0);
        if (inserted) {
            it->second = out.add_state(a.is_accepting(x) && b.is_accepting(y));
            work.emplace_back(x, y);
        }
        return it->second;
    };
    out.set_initial(intern(a.initial_state(), b.initial_state()));
    while (!work.empty()) {
        auto [x, y] = work.front();
        work.pop_front();
        FState from = ids.at({x, y});
        for (const auto& ea : a.edges(x)) {
            for (const auto& eb : b.edges(y)) {
                if (ea.label == eb.label) {
                    out.add_transition(from, ea.label, intern(ea.to, eb.to));
                }
            }
        }
    }
    return out;
}

AdmissibleAutomaton product_with_finite(const AdmissibleAutomaton& a, std::shared_ptr<FiniteView> fa) {
    AdmissibleAutomaton out;
    out.pds = a.pds;
    if (!a.view) {
        out.view = std::move(fa);
    } else {
        out.view = std::make_shared<ProductView>(std::vector<std::shared_ptr<FiniteView>>{a.view, fa});
    }
    return out;
}

// --- emptiness -----------------------------------------------------------------------------

namespace {

std::vector<std::vector<std::size_t>> rules_by_control(const Pds& pds) {
    std::vector<std::vector<std::size_t>> out(pds.num_controls);
    for (std::size_t i = 0; i < pds.rules.size(); ++i) {
        out.at(pds.rules[i].from).push_back(i);
    }
    return out;
}

std::optional<Witness> finite_witness(const Pds& pds, FiniteView& view, ControlId start,
                                      std::size_t max_states, EmptinessStats* stats) {
    struct Node {
        ControlId control;
        FState f;
        std::int64_t parent;
        std::size_t rule;
    };
    std::vector<Node> nodes;
    std::unordered_map<std::uint64_t, std::size_t> seen;
    auto by_control = rules_by_control(pds);
    auto key = [](ControlId c, FState f) { return (static_cast<std::uint64_t>(c) << 32) | f; };
    auto build = [&](std::size_t n) {
        Witness w;
        while (nodes[n].parent >= 0) {
            const PdsRule& r = pds.rules[nodes[n].rule];
            w.labels.push_back(r.label);
            w.rule_trace.push_back(r.id);
            n = static_cast<std::size_t>(nodes[n].parent);
        }
        std::reverse(w.labels.begin(), w.labels.end());
        std::reverse(w.rule_trace.begin(), w.rule_trace.end());
        return w;
    };
    FState f0 = view.initial();
    nodes.push_back({start, f0, -1, 0});
    seen.emplace(key(start, f0), 0);
    if (pds.accepting.at(start) && view.accepting(f0)) {
        return Witness{};
    }
    std::vector<FState> succ;
    for (std::size_t head = 0; head < nodes.size(); ++head) {
        const Node cur = nodes[head];
        for (std::size_t ri : by_control[cur.control]) {
            const PdsRule& r = pds.rules[ri];
            succ.clear();
            view.step(cur.f, r.label, succ);
            for (FState f : succ) {
                auto [it, inserted] = seen.emplace(key(r.to, f), nodes.size());
                if (!inserted) {
                    continue;
                }
                nodes.push_back({r.to, f, static_cast<std::int64_t>(head), ri});
                if (nodes.size() > max_states) {
                    throw ResourceExceeded("product exploration exceeded " + std::to_string(max_states) +
                                           " states");
                }
                if (pds.accepting[r.to] && view.accepting(f)) {
                    if (stats) {
                        stats->explored += nodes.size();
                    }
                    return build(nodes.size() - 1);
                }
            }
        }
    }
    if (stats) {
        stats->explored += nodes.size();
    }
    return std::nullopt;
}

}  // namespace

std::optional<Witness> nonempty_witness(const AdmissibleAutomaton& automaton, const StateId& start,
                                        std::size_t max_states, EmptinessStats* stats) {
    const Pds& pds = *automaton.pds;
    std::shared_ptr<FiniteView> view = automaton.view ? automaton.view : std::make_shared<UniversalView>();
    if (pds.is_finite()) {
        return finite_witness(pds, *view, start.control, max_states, stats);
    }

    // Materialize the finite factor over the letters the system can produce.
    std::vector<ActionLabel> letters;
    for (const auto& r : pds.rules) {
        letters.push_back(r.label);
    }
    std::sort(letters.begin(), letters.end());
    letters.erase(std::unique(letters.begin(), letters.end()), letters.end());
    std::vector<FState> fstates;
    std::unordered_map<FState, std::uint32_t> local;
    std::vector<std::map<ActionLabel, std::vector<std::uint32_t>>> delta;
    auto intern = [&](FState f) {
        auto [it, inserted] = local.emplace(f, static_cast<std::uint32_t>(fstates.size()));
        if (inserted) {
            fstates.push_back(f);
            delta.emplace_back();
            if (fstates.size() * pds.num_controls > max_states) {
                throw ResourceExceeded("product exploration exceeded " + std::to_string(max_states) +
                                       " states");
            }
        }
        return it->second;
    };
    intern(view->initial());
    std::vector<FState> succ;
    for (std::size_t i = 0; i < fstates.size(); ++i) {
        for (const auto& a : letters) {
            succ.clear();
            view->step(fstates[i], a, succ);
            for (FState f : succ) {
                std::uint32_t j = intern(f);
                delta[i][a].push_back(j);
            }
        }
    }
    const std::size_t m = fstates.size();
    if (stats) {
        stats->explored += m * pds.num_controls;
    }

    Pds product;
    product.num_controls = pds.num_controls * m;
    product.num_symbols = pds.num_symbols;
    product.alphabet = letters;
    product.accepting.assign(product.num_controls, false);
    for (ControlId c = 0; c < pds.num_controls; ++c) {
        for (std::uint32_t i = 0; i < m; ++i) {
            product.accepting[c * m + i] = pds.accepting[c] && view->accepting(fstates[i]);
        }
    }
    for (std::size_t ri = 0; ri < pds.rules.size(); ++ri) {
        const PdsRule& r = pds.rules[ri];
        for (std::uint32_t i = 0; i < m; ++i) {
            auto it = delta[i].find(r.label);
            if (it == delta[i].end()) {
                continue;
            }
            for (std::uint32_t j : it->second) {
                product.rules.push_back({static_cast<ControlId>(r.from * m + i), r.pop, r.label,
                                         static_cast<ControlId>(r.to * m + j), r.push,
                                         static_cast<std::int64_t>(ri)});
            }
        }
    }
    PreStar pre(product);
    StateId pstart{static_cast<ControlId>(start.control * m + 0), start.stack};
    auto w = pre.witness(pstart);
    if (!w) {
        return std::nullopt;
    }
    Witness out;
    for (std::size_t k = 0; k < w->rule_trace.size(); ++k) {
        const PdsRule& r = pds.rules.at(static_cast<std::size_t>(w->rule_trace[k]));
        out.labels.push_back(r.label);
        out.rule_trace.push_back(r.id);
    }
    return out;
}

std::optional<Witness> nonempty_witness(const Pds& pds, const StateId& start) {
    return nonempty_witness(AdmissibleAutomaton{&pds, nullptr}, start);
}

std::optional<Witness> nonempty_witness(FiniteView& fa, const std::vector<ActionLabel>& alphabet) {
    Pds one;
    one.num_controls = 1;
    one.accepting = {true};
    one.alphabet = alphabet;
    for (const auto& a : alphabet) {
        one.rules.push_back({0, std::nullopt, a, 0, {}, -1});
    }
    auto shared = std::shared_ptr<FiniteView>(&fa, [](FiniteView*) {});
    return nonempty_witness(AdmissibleAutomaton{&one, shared}, StateId{0, {}});
}

std::optional<Witness> nonempty_witness(FiniteView& fa) {
    auto* explicit_fa = dynamic_cast<FiniteAutomaton*>(&fa);
    if (!explicit_fa) {
        throw AlphabetError("a lazy view needs an explicit alphabet for emptiness checking");
    }
    return nonempty_witness(fa, explicit_fa->alphabet());
}

namespace {

bool replay_impl(const Pds& pds, FiniteView* view, const StateId& start, const Witness& w) {
    if (w.labels.size() != w.rule_trace.size()) {
        return false;
    }
    ControlId control = start.control;
    std::vector<SymbolId> stack = start.stack;  // top-first
    std::set<FState> fs;
    if (view) {
        fs.insert(view->initial());
    }
    std::vector<FState> succ;
    for (std::size_t k = 0; k < w.labels.size(); ++k) {
        const PdsRule* chosen = nullptr;
        for (const auto& r : pds.rules) {
            if (r.from != control || r.id != w.rule_trace[k] || r.label != w.labels[k]) {
                continue;
            }
            if (r.pop && (stack.empty() || stack.front() != *r.pop)) {
                continue;
            }
            chosen = &r;
            break;
        }
        if (!chosen) {
            return false;
        }
        if (chosen->pop) {
            stack.erase(stack.begin());
        }
        stack.insert(stack.begin(), chosen->push.begin(), chosen->push.end());
        control = chosen->to;
        if (view) {
            std::set<FState> next;
            for (FState f : fs) {
                succ.clear();
                view->step(f, w.labels[k], succ);
                next.insert(succ.begin(), succ.end());
            }
            fs = std::move(next);
            if (fs.empty()) {
                return false;
            }
        }
    }
    if (!pds.accepting.at(control)) {
        return false;
    }
    if (!view) {
        return true;
    }
    return std::any_of(fs.begin(), fs.end(), [&](FState f) { return view->accepting(f); });
}

}  // namespace

bool replay(const AdmissibleAutomaton& automaton, const StateId& start, const Witness& w) {
    return replay_impl(*automaton.pds, automaton.view.get(), start, w);
}

bool replay(const Pds& pds, const StateId& start, const Witness& w) {
    return replay_impl(pds, nullptr, start, w);
}

// --- pre* saturation --------------------------------------------------------------------

PreStar::PreStar(const Pds& pds) : pds_(pds) {
    const auto n = static_cast<std::uint32_t>(pds.num_controls);
    const auto marker = static_cast<SymbolId>(pds.num_symbols);
    pa_.final_state = n;
    std::uint32_t next_state = n + 1;
    for (std::size_t ri = 0; ri < pds.rules.size(); ++ri) {
        const PdsRule& r = pds.rules[ri];
        std::vector<SymbolId> pops;
        if (r.pop) {
            pops.push_back(*r.pop);
        } else {
            for (SymbolId g = 0; g <= marker; ++g) {
                pops.push_back(g);
            }
        }
        for (SymbolId g : pops) {
            std::vector<SymbolId> push = r.push;
            if (!r.pop) {
                push.push_back(g);
            }
            if (push.size() <= 2) {
                rules_.push_back({r.from, g, r.to, push, static_cast<std::int64_t>(ri)});
                continue;
            }
            const std::size_t len = push.size();
            std::uint32_t m = next_state++;
            rules_.push_back({r.from, g, m, {push[len - 2], push[len - 1]}, static_cast<std::int64_t>(ri)});
            for (std::size_t j = 1; j <= len - 2; ++j) {
                std::uint32_t to = j < len - 2 ? next_state++ : r.to;
                rules_.push_back({m, push[len - 1 - j], to, {push[len - 2 - j], push[len - 1 - j]}, -1});
                m = to;
            }
        }
    }
    pa_.num_states = next_state;
    saturate();
}

void PreStar::saturate() {
    const auto marker = static_cast<SymbolId>(pds_.num_symbols);
    const std::uint64_t nsym = marker + 1;
    auto tkey = [&](std::uint32_t from, SymbolId g, std::uint32_t to) {
        return (static_cast<std::uint64_t>(from) * nsym + g) * pa_.num_states + to;
    };
    auto fkey = [&](std::uint32_t from, SymbolId g) { return static_cast<std::uint64_t>(from) * nsym + g; };

    std::unordered_map<std::uint64_t, std::uint32_t> ids;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> from_index;
    std::deque<std::uint32_t> work;
    auto add = [&](std::uint32_t from, SymbolId g, std::uint32_t to, std::int64_t rule,
                   std::vector<std::uint32_t> path) {
        auto [it, inserted] = ids.emplace(tkey(from, g, to), static_cast<std::uint32_t>(pa_.transitions.size()));
        if (!inserted) {
            return;
        }
        pa_.transitions.push_back({from, g, to, rule, std::move(path)});
        from_index[fkey(from, g)].push_back(it->second);
        work.push_back(it->second);
    };

    struct Rule1 {
        std::uint32_t from;
        SymbolId pop;
        std::int64_t rule;
        std::int64_t prefix;
    };
    struct Rule2 {
        std::uint32_t from;
        SymbolId pop;
        SymbolId second;
        std::int64_t rule;
    };
    std::unordered_map<std::uint64_t, std::vector<Rule1>> rules1;
    std::unordered_map<std::uint64_t, std::vector<Rule2>> rules2;

    for (ControlId c = 0; c < pds_.num_controls; ++c) {
        if (pds_.accepting[c]) {
            for (SymbolId g = 0; g <= marker; ++g) {
                add(c, g, pa_.final_state, -1, {});
            }
        }
    }
    for (SymbolId g = 0; g <= marker; ++g) {
        add(pa_.final_state, g, pa_.final_state, -1, {});
    }
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        const Expanded& r = rules_[i];
        auto ri = static_cast<std::int64_t>(i);
        if (r.push.empty()) {
            add(r.from, r.pop, r.to, ri, {});
        } else if (r.push.size() == 1) {
            rules1[fkey(r.to, r.push[0])].push_back({r.from, r.pop, ri, -1});
        } else {
            rules2[fkey(r.to, r.push[0])].push_back({r.from, r.pop, r.push[1], ri});
        }
    }

    while (!work.empty()) {
        const std::uint32_t t = work.front();
        work.pop_front();
        const std::uint32_t q = pa_.transitions[t].from;
        const SymbolId g = pa_.transitions[t].symbol;
        const std::uint32_t q2 = pa_.transitions[t].to;
        if (auto it = rules1.find(fkey(q, g)); it != rules1.end()) {
            const auto list = it->second;
            for (const auto& r1 : list) {
                std::vector<std::uint32_t> path;
                if (r1.prefix >= 0) {
                    path.push_back(static_cast<std::uint32_t>(r1.prefix));
                }
                path.push_back(t);
                add(r1.from, r1.pop, q2, r1.rule, std::move(path));
            }
        }
        if (auto it = rules2.find(fkey(q, g)); it != rules2.end()) {
            const auto list = it->second;
            for (const auto& r2 : list) {
                rules1[fkey(q2, r2.second)].push_back({r2.from, r2.pop, r2.rule, static_cast<std::int64_t>(t)});
                auto fit = from_index.find(fkey(q2, r2.second));
                if (fit == from_index.end()) {
                    continue;
                }
                const auto existing = fit->second;
                for (std::uint32_t t2 : existing) {
                    add(r2.from, r2.pop, pa_.transitions[t2].to, r2.rule, {t, t2});
                }
            }
        }
    }
}

std::optional<std::vector<std::uint32_t>> PreStar::accepting_path(const StateId& config) const {
    std::vector<SymbolId> word = config.stack;
    word.push_back(static_cast<SymbolId>(pds_.num_symbols));
    // Layered search with one predecessor per (position, state).
    std::vector<std::unordered_map<std::uint32_t, std::uint32_t>> pred(word.size() + 1);
    std::vector<std::vector<std::uint32_t>> layer(word.size() + 1);
    layer[0].push_back(config.control);
    pred[0].emplace(config.control, 0);
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> by_from;
    for (std::uint32_t t = 0; t < pa_.transitions.size(); ++t) {
        const auto& tr = pa_.transitions[t];
        by_from[(static_cast<std::uint64_t>(tr.from) << 32) | tr.symbol].push_back(t);
    }
    for (std::size_t i = 0; i < word.size(); ++i) {
        for (std::uint32_t s : layer[i]) {
            auto it = by_from.find((static_cast<std::uint64_t>(s) << 32) | word[i]);
            if (it == by_from.end()) {
                continue;
            }
            for (std::uint32_t t : it->second) {
                std::uint32_t to = pa_.transitions[t].to;
                if (pred[i + 1].emplace(to, t).second) {
                    layer[i + 1].push_back(to);
                }
            }
        }
    }
    if (!pred[word.size()].count(pa_.final_state)) {
        return std::nullopt;
    }
    std::vector<std::uint32_t> path(word.size());
    std::uint32_t s = pa_.final_state;
    for (std::size_t i = word.size(); i-- > 0;) {
        std::uint32_t t = pred[i + 1].at(s);
        path[i] = t;
        s = pa_.transitions[t].from;
    }
    return path;
}

bool PreStar::accepts(const StateId& config) const {
    return accepting_path(config).has_value();
}

std::optional<Witness> PreStar::witness(const StateId& config) const {
    auto path = accepting_path(config);
    if (!path) {
        return std::nullopt;
    }
    Witness w;
    std::deque<std::uint32_t> cur(path->begin(), path->end());
    std::size_t guard = 0;
    while (!cur.empty()) {
        const auto& t = pa_.transitions[cur.front()];
        if (t.rule < 0) {
            break;  // initial transition: the current control is accepting
        }
        if (++guard > 50'000'000) {
            throw ResourceExceeded("witness reconstruction did not terminate");
        }
        const Expanded& r = rules_[static_cast<std::size_t>(t.rule)];
        if (r.origin >= 0) {
            const PdsRule& pr = pds_.rules[static_cast<std::size_t>(r.origin)];
            w.labels.push_back(pr.label);
            w.rule_trace.push_back(r.origin);
        }
        cur.pop_front();
        for (auto it = t.path.rbegin(); it != t.path.rend(); ++it) {
            cur.push_front(*it);
        }
    }
    // rule_trace holds indices into pds rules here; map them to rule ids.
    for (auto& id : w.rule_trace) {
        id = pds_.rules[static_cast<std::size_t>(id)].id;
    }
    return w;
}

// --- derived automata ----------------------------------------------------------------------

FiniteAutomaton consistency_automaton(const ProcessSpec& spec) {
    const auto globals = spec.globals();
    const std::size_t radix = spec.values.size() + 1;  // last digit means untouched
    const std::size_t untouched = spec.values.size();
    std::size_t count = 1;
    for (std::size_t i = 0; i < globals.size(); ++i) {
        count *= radix;
    }
    FiniteAutomaton fa(count, full_alphabet(spec));
    std::vector<std::size_t> slot(spec.variables.size(), 0);
    for (std::size_t i = 0; i < globals.size(); ++i) {
        slot[globals[i]] = i;
    }
    auto digit = [&](std::size_t s, std::size_t i) {
        for (std::size_t k = 0; k < i; ++k) {
            s /= radix;
        }
        return s % radix;
    };
    auto with_digit = [&](std::size_t s, std::size_t i, std::size_t d) {
        std::size_t scale = 1;
        for (std::size_t k = 0; k < i; ++k) {
            scale *= radix;
        }
        return s - digit(s, i) * scale + d * scale;
    };
    std::size_t init = 0;
    for (std::size_t i = 0; i < globals.size(); ++i) {
        init = with_digit(init, i, untouched);
    }
    fa.set_initial(static_cast<FState>(init));
    for (std::size_t s = 0; s < count; ++s) {
        fa.set_accepting(static_cast<FState>(s));
        for (const auto& a : fa.alphabet()) {
            bool is_read = a.kind == LabelKind::read || a.kind == LabelKind::bar_read;
            bool is_write = a.kind == LabelKind::write || a.kind == LabelKind::bar_write;
            if ((is_read || is_write) && spec.is_global(a.var)) {
                std::size_t i = slot[a.var];
                std::size_t d = digit(s, i);
                if (is_read) {
                    if (d == a.value || (d == untouched && a.value == spec.init_value)) {
                        fa.add_transition(static_cast<FState>(s), a, static_cast<FState>(s));
                    }
                } else {
                    fa.add_transition(static_cast<FState>(s), a, static_cast<FState>(with_digit(s, i, a.value)));
                }
                continue;
            }
            fa.add_transition(static_cast<FState>(s), a, static_cast<FState>(s));
        }
    }
    return fa;
}

FiniteAutomaton ext_equals_automaton(const ProcessSpec& spec, const std::vector<Action>& beta) {
    FiniteAutomaton fa(beta.size() + 1, full_alphabet(spec));
    fa.set_initial(0);
    fa.set_accepting(static_cast<FState>(beta.size()));
    for (std::size_t i = 0; i <= beta.size(); ++i) {
        for (const auto& a : fa.alphabet()) {
            auto e = ext_of(spec, a);
            if (!e) {
                fa.add_transition(static_cast<FState>(i), a, static_cast<FState>(i));
            } else if (i < beta.size() && *e == beta[i]) {
                fa.add_transition(static_cast<FState>(i), a, static_cast<FState>(i + 1));
            }
        }
    }
    return fa;
}

FiniteAutomaton not_dominating_automaton(const ProcessSpec& spec, const ExtWord& beta) {
    // Canonical decomposition of beta: letters b_0..b_{k-1}, block i follows b_{i-1}.
    std::vector<Action> letters;
    std::vector<std::vector<Action>> blocks(1);
    for (const auto& a : beta.body) {
        if (std::find(letters.begin(), letters.end(), a) == letters.end()) {
            letters.push_back(a);
            blocks.emplace_back();
        } else {
            blocks.back().push_back(a);
        }
    }
    const std::size_t k = letters.size();
    // State (i, j): i letters seen, j letters of block i matched. Plus a dead state.
    std::vector<std::size_t> offset(k + 2, 0);
    for (std::size_t i = 0; i <= k; ++i) {
        offset[i + 1] = offset[i] + blocks[i].size() + 1;
    }
    const std::size_t dead = offset[k + 1];
    FiniteAutomaton fa(dead + 1, full_alphabet(spec));
    fa.set_initial(0);
    auto id = [&](std::size_t i, std::size_t j) { return static_cast<FState>(offset[i] + j); };
    for (std::size_t i = 0; i <= k; ++i) {
        for (std::size_t j = 0; j <= blocks[i].size(); ++j) {
            bool dominated = i == k && j == blocks[i].size();
            fa.set_accepting(id(i, j), !dominated);
            for (const auto& a : fa.alphabet()) {
                auto e = ext_of(spec, a);
                FState to;
                if (!e) {
                    to = id(i, j);
                } else if (i < k && *e == letters[i]) {
                    to = j == blocks[i].size() ? id(i + 1, 0) : static_cast<FState>(dead);
                } else if (std::find(letters.begin(), letters.begin() + static_cast<std::ptrdiff_t>(i), *e) !=
                           letters.begin() + static_cast<std::ptrdiff_t>(i)) {
                    to = (j < blocks[i].size() && *e == blocks[i][j]) ? id(i, j + 1) : id(i, j);
                } else {
                    to = static_cast<FState>(dead);
                }
                fa.add_transition(id(i, j), a, to);
            }
        }
    }
    fa.set_accepting(static_cast<FState>(dead), true);
    for (const auto& a : fa.alphabet()) {
        fa.add_transition(static_cast<FState>(dead), a, static_cast<FState>(dead));
    }
    return fa;
}

FiniteAutomaton target_automaton(const ProcessSpec& spec) {
    FiniteAutomaton fa(2, full_alphabet(spec));
    fa.set_initial(0);
    fa.set_accepting(1);
    for (const auto& a : fa.alphabet()) {
        fa.add_transition(0, a, is_target_label(spec, a) ? 1 : 0);
        fa.add_transition(1, a, 1);
    }
    return fa;
}

// --- DOT export ----------------------------------------------------------------------------------

namespace {

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    return out;
}

}  // namespace

std::string to_dot(const ProcessSpec& spec, const FiniteAutomaton& fa, const std::string& name) {
    std::ostringstream out;
    out << "digraph \"" << escape(name) << "\" {\n  rankdir=LR;\n";
    out << "  __start [shape=point];\n  __start -> s" << fa.initial_state() << ";\n";
    for (FState s = 0; s < fa.num_states(); ++s) {
        out << "  s" << s << " [shape=" << (fa.is_accepting(s) ? "doublecircle" : "circle") << "];\n";
    }
    for (FState s = 0; s < fa.num_states(); ++s) {
        std::map<FState, std::vector<std::string>> grouped;
        for (const auto& e : fa.edges(s)) {
            grouped[e.to].push_back(format_label(spec, e.label));
        }
        for (const auto& [to, labels] : grouped) {
            std::string text;
            for (const auto& l : labels) {
                text += (text.empty() ? "" : "\\n") + escape(l);
            }
            out << "  s" << s << " -> s" << to << " [label=\"" << text << "\"];\n";
        }
    }
    out << "}\n";
    return out.str();
}

std::string to_dot(const Pds& pds, const PAutomaton& pa, const std::string& name) {
    std::ostringstream out;
    out << "digraph \"" << escape(name) << "\" {\n  rankdir=LR;\n";
    for (std::uint32_t s = 0; s < pa.num_states; ++s) {
        const char* shape = s == pa.final_state ? "doublecircle" : (s < pds.num_controls ? "box" : "circle");
        out << "  s" << s << " [shape=" << shape << "];\n";
    }
    for (const auto& t : pa.transitions) {
        std::string sym = t.symbol == pds.num_symbols ? "$" : "g" + std::to_string(t.symbol);
        out << "  s" << t.from << " -> s" << t.to << " [label=\"" << sym << "\"" << (t.rule >= 0 ? "" : ", style=dashed")
            << "];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace dpp
