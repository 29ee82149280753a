#include "dpp/hypothesis.hpp"

#include <algorithm>

#include "dpp/words.hpp"

namespace dpp {

// --- trie ------------------------------------------------------------------------

Hypothesis::Hypothesis() : nodes_(1), action_(1), head_(1) {}

Hypothesis::Hypothesis(const std::set<ExtWord>& words) : Hypothesis() {
    for (const auto& w : words) {
        insert(w);
    }
}

void Hypothesis::insert(const ExtWord& w) {
    if (!w.head) {
        throw InvalidHypothesis("hypothesis words must start with a spawn");
    }
    auto [it, inserted] = heads_.emplace(*w.head, static_cast<NodeId>(nodes_.size()));
    if (inserted) {
        nodes_.push_back(Node{0, {}});
        action_.emplace_back();
        head_.push_back(*w.head);
    }
    NodeId n = it->second;
    for (const auto& a : w.body) {
        auto [cit, fresh] = nodes_[n].children.emplace(a, static_cast<NodeId>(nodes_.size()));
        if (fresh) {
            NodeId id = cit->second;
            nodes_.push_back(Node{n, {}});
            action_.push_back(a);
            head_.push_back(*w.head);
            n = id;
        } else {
            n = cit->second;
        }
    }
    words_.insert(w);
}

std::optional<NodeId> Hypothesis::head_node(const StateId& p) const {
    auto it = heads_.find(p);
    if (it == heads_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::optional<NodeId> Hypothesis::child(NodeId n, const Action& a) const {
    const auto& ch = nodes_.at(n).children;
    auto it = ch.find(a);
    if (it == ch.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::optional<NodeId> Hypothesis::find(const ExtWord& w) const {
    if (!w.head) {
        return std::nullopt;
    }
    auto n = head_node(*w.head);
    for (std::size_t i = 0; n && i < w.body.size(); ++i) {
        n = child(*n, w.body[i]);
    }
    return n;
}

ExtWord Hypothesis::word_of(NodeId n) const {
    if (n == 0) {
        return {};
    }
    ExtWord w{head_.at(n), {}};
    while (nodes_.at(n).parent != 0) {
        w.body.push_back(action_[n]);
        n = nodes_[n].parent;
    }
    std::reverse(w.body.begin(), w.body.end());
    return w;
}

std::set<ExtWord> words_of(const Hypothesis& L, const std::vector<NodeId>& B) {
    std::set<ExtWord> out;
    for (NodeId n : B) {
        out.insert(L.word_of(n));
    }
    return out;
}

// --- transitions -----------------------------------------------------------------

HypState initial_hyp_state(const ProcessSpec& spec, const StateId& p) {
    return HypState{p, HypContext{spec.initial_valuation(), {}}};
}

namespace {

void add_nodes(std::vector<NodeId>& B, const std::vector<NodeId>& extra) {
    B.insert(B.end(), extra.begin(), extra.end());
    std::sort(B.begin(), B.end());
    B.erase(std::unique(B.begin(), B.end()), B.end());
}

}  // namespace

void hyp_context_step(const ProcessSpec& spec, const Hypothesis& L, const HypContext& ctx,
                      const ActionLabel& a, ExtensionMode mode, std::vector<HypContext>& out) {
    switch (a.kind) {
        case LabelKind::tau:
        case LabelKind::input:
        case LabelKind::output:
            out.push_back(ctx);
            return;
        case LabelKind::read:
            if (spec.is_global(a.var) || ctx.lambda.at(spec.local_slot(a.var)) == a.value) {
                out.push_back(ctx);
            }
            return;
        case LabelKind::write:
            out.push_back(ctx);
            if (spec.is_local(a.var)) {
                out.back().lambda.at(spec.local_slot(a.var)) = a.value;
            }
            return;
        case LabelKind::spawn: {
            auto n = L.head_node(spec.spawn_targets.at(a.target));
            if (n) {
                out.push_back(ctx);
                add_nodes(out.back().B, {*n});
            }
            return;
        }
        case LabelKind::bar_read:
        case LabelKind::bar_write:
            break;
    }
    const bool global = spec.is_global(a.var);
    const bool is_read = a.kind == LabelKind::bar_read;
    if (!global && is_read && ctx.lambda.at(spec.local_slot(a.var)) != a.value) {
        return;
    }
    Action b{global ? (is_read ? ActionKind::read : ActionKind::write)
                    : (is_read ? ActionKind::input : ActionKind::output),
             a.var, a.value};
    std::vector<NodeId> extended;
    for (NodeId n : ctx.B) {
        if (auto c = L.child(n, b)) {
            extended.push_back(*c);
        }
    }
    if (extended.empty()) {
        return;
    }
    HypContext base = ctx;
    if (!global && !is_read) {
        base.lambda.at(spec.local_slot(a.var)) = a.value;
    }
    if (mode == ExtensionMode::maximal) {
        out.push_back(std::move(base));
        add_nodes(out.back().B, extended);
        return;
    }
    if (extended.size() > 20) {
        throw ResourceExceeded("full-subset extension over more than 20 members");
    }
    const std::size_t subsets = std::size_t{1} << extended.size();
    for (std::size_t mask = 1; mask < subsets; ++mask) {
        std::vector<NodeId> pick;
        for (std::size_t i = 0; i < extended.size(); ++i) {
            if (mask & (std::size_t{1} << i)) {
                pick.push_back(extended[i]);
            }
        }
        out.push_back(base);
        add_nodes(out.back().B, pick);
    }
}

std::vector<std::pair<ActionLabel, HypState>> hyp_successors(const HypState& r, const ProcessSpec& spec,
                                                             const Hypothesis& L, ExtensionMode mode) {
    std::vector<std::pair<ActionLabel, HypState>> out;
    std::vector<HypContext> next;
    for (const auto& step : rule_steps(spec, r.state)) {
        const ActionLabel& a = spec.rules[step.rule].label;
        next.clear();
        hyp_context_step(spec, L, r.ctx, a, mode, next);
        for (auto& c : next) {
            out.push_back({a, HypState{step.to, std::move(c)}});
        }
    }
    for (const auto& a : barred_alphabet(spec)) {
        next.clear();
        hyp_context_step(spec, L, r.ctx, a, mode, next);
        for (auto& c : next) {
            out.push_back({a, HypState{r.state, std::move(c)}});
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// --- A_L ---------------------------------------------------------------------------

HypothesisView::HypothesisView(const ProcessSpec& spec, const Hypothesis& L, ExtensionMode mode)
    : spec_(spec), L_(L), mode_(mode) {}

FState HypothesisView::intern(const HypContext& c) {
    auto [it, inserted] = ids_.emplace(c, static_cast<FState>(contexts_.size()));
    if (inserted) {
        contexts_.push_back(c);
        memo_.emplace_back();
    }
    return it->second;
}

FState HypothesisView::initial() {
    return intern(HypContext{spec_.initial_valuation(), {}});
}

void HypothesisView::step(FState s, const ActionLabel& a, std::vector<FState>& out) {
    const std::uint64_t key = label_key(a);
    auto hit = memo_.at(s).find(key);
    if (hit == memo_[s].end()) {
        scratch_.clear();
        HypContext ctx = contexts_.at(s);
        hyp_context_step(spec_, L_, ctx, a, mode_, scratch_);
        std::vector<FState> ids;
        for (const auto& c : scratch_) {
            ids.push_back(intern(c));
        }
        hit = memo_[s].emplace(key, std::move(ids)).first;
    }
    out.insert(out.end(), hit->second.begin(), hit->second.end());
}

std::string HypothesisView::describe(FState s) {
    const HypContext& c = contexts_.at(s);
    std::string out = "{";
    auto locals = spec_.locals();
    for (std::size_t i = 0; i < locals.size(); ++i) {
        out += (i ? ", " : "") + spec_.variables[locals[i]].name + "=" + spec_.values.at(c.lambda.at(i));
    }
    out += "} B={";
    bool first = true;
    for (const auto& w : words_of(L_, c.B)) {
        out += (first ? "" : "; ") + format_word(spec_, w);
        first = false;
    }
    return out + "}";
}

// --- derived automata ----------------------------------------------------------------

FiniteAutomaton produces_automaton(const ProcessSpec& spec, const Action& a) {
    FiniteAutomaton fa(2, full_alphabet(spec));
    fa.set_initial(0);
    fa.set_accepting(1);
    for (const auto& l : fa.alphabet()) {
        auto e = ext_of(spec, l);
        fa.add_transition(0, l, e && *e == a ? 1 : 0);
        fa.add_transition(1, l, 1);
    }
    return fa;
}

FiniteAutomaton signature_prefix_automaton(const ProcessSpec& spec, const std::vector<Action>& prefix) {
    const std::size_t n = prefix.size();
    FiniteAutomaton fa(n + 1, full_alphabet(spec));
    fa.set_initial(0);
    fa.set_accepting(static_cast<FState>(n));
    for (std::size_t i = 0; i <= n; ++i) {
        for (const auto& l : fa.alphabet()) {
            auto e = ext_of(spec, l);
            auto seen_end = prefix.begin() + static_cast<std::ptrdiff_t>(i);
            if (i == n || !e || std::find(prefix.begin(), seen_end, *e) != seen_end) {
                fa.add_transition(static_cast<FState>(i), l, static_cast<FState>(i));
            } else if (*e == prefix[i]) {
                fa.add_transition(static_cast<FState>(i), l, static_cast<FState>(i + 1));
            }
        }
    }
    return fa;
}

// --- queries ---------------------------------------------------------------------------

namespace {

/// External actions of a spec's labels, numbered densely.
struct ExtIndex {
    std::unordered_map<std::uint64_t, std::int32_t> of_label;
    std::vector<ActionLabel> representative;  // one label per external action

    explicit ExtIndex(const ProcessSpec& spec) {
        std::map<Action, std::int32_t> ids;
        for (const auto& l : full_alphabet(spec)) {
            auto e = ext_of(spec, l);
            if (!e) {
                continue;
            }
            auto [it, inserted] = ids.emplace(*e, static_cast<std::int32_t>(ids.size()));
            if (inserted) {
                representative.push_back(l);
            }
            of_label.emplace(label_key(l), it->second);
        }
    }

    std::int32_t find(const ActionLabel& a) const {
        auto it = of_label.find(label_key(a));
        return it == of_label.end() ? -1 : it->second;
    }
};

/// A non-domination automaton as a dense table over external actions. These
/// automata loop on every label without an external action.
struct DominationTable {
    std::vector<FState> next;  // state * actions + action
    std::vector<bool> accepting;
    FState initial = 0;
};

DominationTable compile(const FiniteAutomaton& fa, const ExtIndex& index) {
    DominationTable t;
    const std::size_t n = index.representative.size();
    t.initial = fa.initial_state();
    t.next.resize(fa.num_states() * n);
    std::vector<FState> succ;
    for (FState s = 0; s < fa.num_states(); ++s) {
        t.accepting.push_back(fa.is_accepting(s));
        for (std::size_t e = 0; e < n; ++e) {
            succ.clear();
            const_cast<FiniteAutomaton&>(fa).step(s, index.representative[e], succ);
            t.next[s * n + e] = succ.at(0);
        }
    }
    return t;
}

/// Intersection of non-domination automata.
class DominationView : public FiniteView {
public:
    DominationView(const ExtIndex& index, const std::vector<std::shared_ptr<const DominationTable>>& tables)
        : index_(index), tables_(tables) {}

    FState initial() override {
        std::vector<FState> t;
        for (const auto& d : tables_) {
            t.push_back(d->initial);
        }
        return intern(t);
    }
    bool accepting(FState s) override { return accepting_[s]; }
    void step(FState s, const ActionLabel& a, std::vector<FState>& out) override {
        const std::int32_t e = index_.find(a);
        if (e < 0) {
            out.push_back(s);
            return;
        }
        const std::size_t n = index_.representative.size();
        tuple_ = states_[s];
        for (std::size_t i = 0; i < tables_.size(); ++i) {
            tuple_[i] = tables_[i]->next[tuple_[i] * n + static_cast<std::size_t>(e)];
        }
        out.push_back(intern(tuple_));
    }

private:
    FState intern(const std::vector<FState>& t) {
        auto [it, inserted] = ids_.emplace(t, static_cast<FState>(states_.size()));
        if (inserted) {
            states_.push_back(t);
            bool acc = true;
            for (std::size_t i = 0; i < tables_.size() && acc; ++i) {
                acc = tables_[i]->accepting[t[i]];
            }
            accepting_.push_back(acc);
        }
        return it->second;
    }

    const ExtIndex& index_;
    std::vector<std::shared_ptr<const DominationTable>> tables_;
    std::vector<std::vector<FState>> states_;
    std::vector<bool> accepting_;
    std::unordered_map<std::vector<FState>, FState, TupleHash> ids_;
    std::vector<FState> tuple_;
};

struct Query {
    Pds pds;
    std::shared_ptr<HypothesisView> view;
    std::vector<std::shared_ptr<FiniteView>> parts;

    Query(const ProcessSpec& spec, const Hypothesis& L, const CoreOptions& options)
        : pds(alphabet_extend(associated_automaton(spec), barred_alphabet(spec))),
          view(std::make_shared<HypothesisView>(spec, L, options.mode)) {
        parts.push_back(view);
        if (options.consistent && !spec.globals().empty()) {
            parts.push_back(std::make_shared<FiniteAutomaton>(consistency_automaton(spec)));
        }
    }

    std::optional<Witness> run(const StateId& p, std::vector<std::shared_ptr<FiniteView>> extra,
                               const CoreOptions& options, CoreStats* stats) const {
        auto all = parts;
        all.insert(all.end(), extra.begin(), extra.end());
        EmptinessStats es;
        auto w = nonempty_witness(AdmissibleAutomaton{&pds, std::make_shared<ProductView>(all)}, p,
                                  options.max_states, &es);
        if (stats) {
            ++stats->emptiness_checks;
            stats->explored += es.explored;
        }
        return w;
    }
};

void check_start(const ProcessSpec& spec, const StateId& p) {
    if (p.control >= spec.controls.size()) {
        throw ValidationError("unknown start state");
    }
    for (SymbolId s : p.stack) {
        if (s >= spec.stack_symbols.size()) {
            throw ValidationError("unknown stack symbol in start state");
        }
    }
}

}  // namespace

std::set<ExtWord> compute_core_K(const ProcessSpec& spec, const Hypothesis& L, const StateId& p,
                                 const CoreOptions& options, CoreStats* stats) {
    check_start(spec, p);
    Query q(spec, L, options);
    const ExtIndex index(spec);
    // N_beta for every core word found so far.
    std::vector<std::shared_ptr<const DominationTable>> dominated;
    std::set<ExtWord> result;
    std::size_t iterations = 0;
    while (true) {
        if (++iterations > options.max_iterations) {
            throw ResourceExceeded("core computation exceeded " + std::to_string(options.max_iterations) +
                                   " iterations");
        }
        if (stats) {
            ++stats->iterations;
        }
        const auto filter = std::make_shared<DominationView>(index, dominated);
        auto w = q.run(p, {filter}, options, stats);
        if (!w) {
            break;
        }
        ExtWord e{p, ext_project(spec, w->labels)};
        std::optional<ExtWord> chosen;
        for (const auto& beta : minimal_candidates(e, options.max_candidates)) {
            if (beta == e) {
                chosen = beta;
                break;
            }
            auto equals = std::make_shared<FiniteAutomaton>(ext_equals_automaton(spec, beta.body));
            if (q.run(p, {std::make_shared<DominationView>(index, dominated), equals}, options, stats)) {
                chosen = beta;
                break;
            }
        }
        result.insert(*chosen);
        dominated.push_back(
            std::make_shared<const DominationTable>(compile(not_dominating_automaton(spec, *chosen), index)));
    }
    return result;
}

std::set<ExtWord> signature_set(const ProcessSpec& spec, const Hypothesis& L, const StateId& p,
                                const CoreOptions& options, CoreStats* stats) {
    check_start(spec, p);
    Query q(spec, L, options);
    std::set<Action> actions;
    for (const auto& a : q.pds.alphabet) {
        if (auto e = ext_of(spec, a)) {
            actions.insert(*e);
        }
    }
    std::set<ExtWord> result{ExtWord{p, {}}};
    std::vector<std::vector<Action>> todo{{}};
    while (!todo.empty()) {
        auto prefix = std::move(todo.back());
        todo.pop_back();
        for (const auto& a : actions) {
            if (std::find(prefix.begin(), prefix.end(), a) != prefix.end()) {
                continue;
            }
            auto longer = prefix;
            longer.push_back(a);
            auto fa = std::make_shared<FiniteAutomaton>(signature_prefix_automaton(spec, longer));
            if (q.run(p, {fa}, options, stats)) {
                result.insert(ExtWord{p, longer});
                todo.push_back(std::move(longer));
            }
        }
    }
    return result;
}

bool can_produce(const ProcessSpec& spec, const Hypothesis& L, const StateId& p, const Action& a,
                 const CoreOptions& options, CoreStats* stats) {
    check_start(spec, p);
    Query q(spec, L, options);
    return q.run(p, {std::make_shared<FiniteAutomaton>(produces_automaton(spec, a))}, options, stats)
        .has_value();
}

std::optional<Witness> target_witness(const ProcessSpec& spec, const Hypothesis& L, const StateId& p,
                                      const CoreOptions& options, CoreStats* stats) {
    check_start(spec, p);
    Query q(spec, L, options);
    return q.run(p, {std::make_shared<FiniteAutomaton>(target_automaton(spec))}, options, stats);
}

}  // namespace dpp
