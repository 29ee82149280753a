#include "dpp/oracle.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

namespace dpp {

std::strong_ordering MTree::operator<=>(const MTree& o) const {
    if (auto c = state <=> o.state; c != 0) {
        return c;
    }
    if (auto c = lambda <=> o.lambda; c != 0) {
        return c;
    }
    if (auto c = counts <=> o.counts; c != 0) {
        return c;
    }
    return std::lexicographical_compare_three_way(children.begin(), children.end(), o.children.begin(),
                                                  o.children.end());
}

std::size_t MTree::size() const {
    std::size_t n = 1;
    for (std::size_t i = 0; i < children.size(); ++i) {
        n += counts[i] * children[i].size();
    }
    return n;
}

std::strong_ordering STree::operator<=>(const STree& o) const {
    if (auto c = state <=> o.state; c != 0) {
        return c;
    }
    if (auto c = lambda <=> o.lambda; c != 0) {
        return c;
    }
    return std::lexicographical_compare_three_way(children.begin(), children.end(), o.children.begin(),
                                                  o.children.end());
}

std::vector<ActionLabel> ReachReport::labels() const {
    std::vector<ActionLabel> out;
    for (const auto& s : run) {
        out.push_back(s.label);
    }
    return out;
}

MTree initial_mtree(const ProcessSpec& spec, const StateId& start) {
    return MTree{start, spec.initial_valuation(), {}, {}};
}

STree initial_stree(const ProcessSpec& spec, const StateId& start) {
    return STree{start, spec.initial_valuation(), {}};
}

// --- consistency -----------------------------------------------------------------

ConsistencyMonitor::ConsistencyMonitor(const ProcessSpec& spec)
    : spec_(spec), slot_(spec.variables.size(), 0), untouched_(static_cast<ValueId>(spec.values.size())) {
    auto globals = spec.globals();
    for (std::size_t i = 0; i < globals.size(); ++i) {
        slot_[globals[i]] = i;
    }
}

std::vector<ValueId> ConsistencyMonitor::initial() const {
    return std::vector<ValueId>(spec_.globals().size(), untouched_);
}

bool ConsistencyMonitor::apply(std::vector<ValueId>& status, const ActionLabel& a) const {
    bool is_read = a.kind == LabelKind::read || a.kind == LabelKind::bar_read;
    bool is_write = a.kind == LabelKind::write || a.kind == LabelKind::bar_write;
    if ((!is_read && !is_write) || !spec_.is_global(a.var)) {
        return true;
    }
    ValueId& s = status.at(slot_[a.var]);
    if (is_write) {
        s = a.value;
        return true;
    }
    return s == a.value || (s == untouched_ && a.value == spec_.init_value);
}

bool is_consistent(const ProcessSpec& spec, const std::vector<ActionLabel>& labels) {
    ConsistencyMonitor m(spec);
    auto status = m.initial();
    for (const auto& a : labels) {
        if (!m.apply(status, a)) {
            return false;
        }
    }
    return true;
}

// --- tree store ---------------------------------------------------------------------

namespace {

void put(std::string& out, std::uint32_t v) {
    out.append(reinterpret_cast<const char*>(&v), sizeof v);
}

/// Hash-consed trees. Children are (tree id, multiplicity) pairs sorted by id;
/// in set mode every multiplicity is 1.
class TreeStore {
public:
    using Id = std::uint32_t;
    using Moves = std::vector<std::pair<ActionLabel, Id>>;

    TreeStore(const ProcessSpec& spec, const ExploreBounds& bounds, bool multiset)
        : spec_(spec), bounds_(bounds), multiset_(multiset) {}

    Id leaf(const StateId& s) { return intern(Node{s, spec_.initial_valuation(), {}}); }

    Id from(const MTree& t) {
        Node n{t.state, t.lambda, {}};
        for (std::size_t i = 0; i < t.children.size(); ++i) {
            add(n, from(t.children[i]), t.counts[i]);
        }
        return intern(std::move(n));
    }

    Id from(const STree& t) {
        Node n{t.state, t.lambda, {}};
        for (const auto& c : t.children) {
            add(n, from(c), 1);
        }
        return intern(std::move(n));
    }

    MTree to_mtree(Id id) const {
        const Node& n = nodes_.at(id);
        MTree t{n.state, n.lambda, {}, {}};
        std::vector<std::pair<MTree, std::uint32_t>> kids;
        for (const auto& [c, k] : n.kids) {
            kids.push_back({to_mtree(c), k});
        }
        std::sort(kids.begin(), kids.end());
        for (auto& [c, k] : kids) {
            t.children.push_back(std::move(c));
            t.counts.push_back(k);
        }
        return t;
    }

    STree to_stree(Id id) const {
        const Node& n = nodes_.at(id);
        STree t{n.state, n.lambda, {}};
        for (const auto& kid : n.kids) {
            t.children.push_back(to_stree(kid.first));
        }
        std::sort(t.children.begin(), t.children.end());
        return t;
    }

    std::string render(Id id) const {
        return multiset_ ? format_tree(spec_, to_mtree(id)) : format_tree(spec_, to_stree(id));
    }

    const StateId& state(Id id) const { return nodes_.at(id).state; }
    const std::vector<ValueId>& lambda(Id id) const { return nodes_.at(id).lambda; }
    std::size_t size() const { return nodes_.size(); }

    /// Moves of the tree id placed at the given depth (root depth 0).
    const Moves& successors(Id id, std::size_t depth) {
        const std::uint64_t key = (static_cast<std::uint64_t>(id) << 16) | depth;
        if (auto it = memo_.find(key); it != memo_.end()) {
            return it->second;
        }
        Moves out;
        const Node base = nodes_.at(id);
        for (const auto& step : rule_steps(spec_, base.state)) {
            if (step.to.stack.size() > bounds_.max_stack_height) {
                continue;
            }
            const ActionLabel& a = spec_.rules[step.rule].label;
            Node next = base;
            next.state = step.to;
            if ((a.kind == LabelKind::read || a.kind == LabelKind::write) && spec_.is_local(a.var)) {
                auto& v = next.lambda.at(spec_.local_slot(a.var));
                if (a.kind == LabelKind::read && v != a.value) {
                    continue;
                }
                v = a.value;
            }
            if (a.kind != LabelKind::spawn) {
                out.push_back({a, intern(std::move(next))});
                continue;
            }
            const bool deeper = depth + 1 <= bounds_.max_depth;
            Id child = leaf(spec_.spawn_targets.at(a.target));
            out.push_back({a, intern(next)});
            if (!deeper) {
                continue;
            }
            if (!multiset_) {
                add(next, child, 1);
                out.back().second = intern(std::move(next));
                continue;
            }
            std::size_t total = 0;
            for (const auto& kid : base.kids) {
                total += kid.second;
            }
            for (std::size_t n = total + 1; n <= bounds_.max_children_per_node; ++n) {
                add(next, child, 1);
                out.push_back({a, intern(next)});
            }
        }
        for (std::size_t i = 0; i < base.kids.size(); ++i) {
            const Id kid = base.kids[i].first;
            const Moves moves = successors(kid, depth + 1);
            for (const auto& [a, moved] : moves) {
                Node next = base;
                auto label = lift(a, next.lambda);
                if (!label) {
                    continue;
                }
                if (multiset_) {
                    remove_one(next, i);
                }
                add(next, moved, 1);
                out.push_back({*label, intern(std::move(next))});
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return memo_.emplace(key, std::move(out)).first->second;
    }

private:
    struct Node {
        StateId state;
        std::vector<ValueId> lambda;
        std::vector<std::pair<Id, std::uint32_t>> kids;
    };

    void add(Node& n, Id c, std::uint32_t k) const {
        auto it = std::lower_bound(n.kids.begin(), n.kids.end(), std::make_pair(c, std::uint32_t{0}));
        if (it != n.kids.end() && it->first == c) {
            if (multiset_) {
                it->second += k;
            }
        } else {
            n.kids.insert(it, {c, multiset_ ? k : 1});
        }
    }

    static void remove_one(Node& n, std::size_t i) {
        if (--n.kids[i].second == 0) {
            n.kids.erase(n.kids.begin() + static_cast<std::ptrdiff_t>(i));
        }
    }

    Id intern(Node n) {
        std::string key;
        put(key, n.state.control);
        put(key, static_cast<std::uint32_t>(n.state.stack.size()));
        for (auto x : n.state.stack) {
            put(key, x);
        }
        for (auto v : n.lambda) {
            put(key, v);
        }
        for (const auto& [c, k] : n.kids) {
            put(key, c);
            put(key, k);
        }
        auto [it, inserted] = ids_.emplace(std::move(key), static_cast<Id>(nodes_.size()));
        if (inserted) {
            nodes_.push_back(std::move(n));
        }
        return it->second;
    }

    /// Label seen by the parent when a child steps with a; nullopt if lambda blocks it.
    std::optional<ActionLabel> lift(const ActionLabel& a, std::vector<ValueId>& lambda) const {
        auto e = ext_of(spec_, a);
        if (!e) {
            return ActionLabel::tau();
        }
        switch (e->kind) {
            case ActionKind::read:
                return ActionLabel::bar_read(e->var, e->value);
            case ActionKind::write:
                return ActionLabel::bar_write(e->var, e->value);
            case ActionKind::input:
                if (lambda.at(spec_.local_slot(e->var)) != e->value) {
                    return std::nullopt;
                }
                return ActionLabel::bar_read(e->var, e->value);
            case ActionKind::output:
                lambda.at(spec_.local_slot(e->var)) = e->value;
                return ActionLabel::bar_write(e->var, e->value);
        }
        return std::nullopt;
    }

    const ProcessSpec& spec_;
    ExploreBounds bounds_;
    bool multiset_;
    std::vector<Node> nodes_;
    std::unordered_map<std::string, Id> ids_;
    std::unordered_map<std::uint64_t, Moves> memo_;
};

}  // namespace

std::vector<std::pair<ActionLabel, MTree>> mtree_successors(const MTree& t, const ProcessSpec& spec,
                                                            const ExploreBounds& bounds, std::size_t depth) {
    TreeStore store(spec, bounds, true);
    std::vector<std::pair<ActionLabel, MTree>> out;
    for (const auto& [a, id] : store.successors(store.from(t), depth)) {
        out.push_back({a, store.to_mtree(id)});
    }
    return out;
}

std::vector<std::pair<ActionLabel, STree>> stree_successors(const STree& s, const ProcessSpec& spec,
                                                            const ExploreBounds& bounds, std::size_t depth) {
    TreeStore store(spec, bounds, false);
    std::vector<std::pair<ActionLabel, STree>> out;
    for (const auto& [a, id] : store.successors(store.from(s), depth)) {
        out.push_back({a, store.to_stree(id)});
    }
    return out;
}

// --- search ------------------------------------------------------------------------

namespace {

struct SearchNode {
    TreeStore::Id tree;
    std::vector<ValueId> status;
    std::int64_t parent;
    ActionLabel label;
    std::uint32_t steps;
};

std::string search_key(TreeStore::Id tree, const std::vector<ValueId>& status) {
    std::string k;
    put(k, tree);
    for (auto v : status) {
        put(k, v);
    }
    return k;
}

ReachReport explore(const ProcessSpec& spec, const ExploreBounds& bounds, bool multiset) {
    TreeStore store(spec, bounds, multiset);
    ConsistencyMonitor monitor(spec);
    std::vector<SearchNode> nodes;
    std::unordered_set<std::string> seen;
    ReachReport report;
    nodes.push_back({store.leaf(spec.init), monitor.initial(), -1, {}, 0});
    seen.insert(search_key(nodes[0].tree, nodes[0].status));
    for (std::size_t head = 0; head < nodes.size(); ++head) {
        if (nodes[head].steps >= bounds.max_steps) {
            ++report.frontier;
            continue;
        }
        const auto moves = store.successors(nodes[head].tree, 0);
        for (const auto& [a, t] : moves) {
            auto status = nodes[head].status;
            if (!monitor.apply(status, a)) {
                continue;
            }
            if (is_target_label(spec, a)) {
                report.found = true;
                std::vector<TraceStep> run{{a, store.render(t)}};
                for (auto n = static_cast<std::int64_t>(head); nodes[n].parent >= 0; n = nodes[n].parent) {
                    run.push_back({nodes[n].label, store.render(nodes[n].tree)});
                }
                std::reverse(run.begin(), run.end());
                report.run = std::move(run);
                report.explored = nodes.size();
                return report;
            }
            if (!seen.insert(search_key(t, status)).second) {
                continue;
            }
            if (nodes.size() >= bounds.max_states || store.size() >= bounds.max_states) {
                report.truncated = true;
                report.explored = nodes.size();
                return report;
            }
            nodes.push_back({t, std::move(status), static_cast<std::int64_t>(head), a, nodes[head].steps + 1});
        }
    }
    report.explored = nodes.size();
    return report;
}

}  // namespace

ReachReport explore_multiset(const ProcessSpec& spec, const ExploreBounds& bounds) {
    return explore(spec, bounds, true);
}

ReachReport explore_set(const ProcessSpec& spec, const ExploreBounds& bounds) {
    return explore(spec, bounds, false);
}

std::set<std::pair<StateId, std::vector<ValueId>>> root_configurations(const ProcessSpec& spec,
                                                                      const StateId& start,
                                                                      const ExploreBounds& bounds,
                                                                      bool consistent) {
    TreeStore store(spec, bounds, false);
    ConsistencyMonitor monitor(spec);
    std::set<std::pair<StateId, std::vector<ValueId>>> out;
    std::unordered_set<std::string> seen;
    std::deque<SearchNode> todo;
    todo.push_back({store.leaf(start), monitor.initial(), -1, {}, 0});
    seen.insert(search_key(todo.front().tree, todo.front().status));
    while (!todo.empty()) {
        SearchNode cur = std::move(todo.front());
        todo.pop_front();
        out.insert({store.state(cur.tree), store.lambda(cur.tree)});
        if (cur.steps >= bounds.max_steps) {
            continue;
        }
        const auto moves = store.successors(cur.tree, 0);
        for (const auto& [a, t] : moves) {
            auto status = cur.status;
            if (consistent && !monitor.apply(status, a)) {
                continue;
            }
            if (!seen.insert(search_key(t, status)).second) {
                continue;
            }
            if (seen.size() > bounds.max_states) {
                throw ResourceExceeded("root configuration enumeration exceeded the state cap");
            }
            todo.push_back({t, std::move(status), -1, a, cur.steps + 1});
        }
    }
    return out;
}

std::set<ExtWord> enumerate_ext_words(const ProcessSpec& spec, const StateId& start,
                                      const ExploreBounds& bounds, std::size_t max_length, bool consistent) {
    TreeStore store(spec, bounds, false);
    ConsistencyMonitor monitor(spec);
    std::set<ExtWord> out;
    std::unordered_set<std::string> seen;
    struct Item {
        TreeStore::Id tree;
        std::vector<ValueId> status;
        std::vector<Action> word;
        std::size_t steps;
    };
    std::deque<Item> todo;
    todo.push_back({store.leaf(start), monitor.initial(), {}, 0});
    while (!todo.empty()) {
        Item cur = std::move(todo.front());
        todo.pop_front();
        out.insert(ExtWord{start, cur.word});
        if (cur.steps >= bounds.max_steps) {
            continue;
        }
        const auto moves = store.successors(cur.tree, 0);
        for (const auto& [a, t] : moves) {
            auto status = cur.status;
            if (consistent && !monitor.apply(status, a)) {
                continue;
            }
            auto word = cur.word;
            if (auto e = ext_of(spec, a)) {
                if (word.size() == max_length) {
                    continue;
                }
                word.push_back(*e);
            }
            std::string k = search_key(t, status);
            for (const auto& x : word) {
                k.push_back(static_cast<char>(x.kind));
                put(k, x.var);
                put(k, x.value);
            }
            if (!seen.insert(std::move(k)).second) {
                continue;
            }
            if (seen.size() > bounds.max_states) {
                throw ResourceExceeded("ext-word enumeration exceeded the state cap");
            }
            todo.push_back({t, std::move(status), std::move(word), cur.steps + 1});
        }
    }
    return out;
}

// --- order and projection -----------------------------------------------------------

bool stree_leq(const STree& a, const STree& b) {
    if (a.state != b.state || a.lambda != b.lambda) {
        return false;
    }
    for (const auto& c : a.children) {
        bool covered = false;
        for (const auto& d : b.children) {
            if (stree_leq(c, d)) {
                covered = true;
                break;
            }
        }
        if (!covered) {
            return false;
        }
    }
    return true;
}

STree set_of(const MTree& t) {
    STree s{t.state, t.lambda, {}};
    for (const auto& c : t.children) {
        s.children.push_back(set_of(c));
    }
    std::sort(s.children.begin(), s.children.end());
    s.children.erase(std::unique(s.children.begin(), s.children.end()), s.children.end());
    return s;
}

// --- rendering ------------------------------------------------------------------------

namespace {

std::string format_node(const ProcessSpec& spec, const StateId& s, const std::vector<ValueId>& lambda) {
    std::string out = spec.controls.at(s.control);
    if (spec.kind == ProcessKind::pushdown) {
        out += "[";
        for (std::size_t i = 0; i < s.stack.size(); ++i) {
            out += (i ? " " : "") + spec.stack_symbols.at(s.stack[i]);
        }
        out += "]";
    }
    if (!lambda.empty()) {
        auto locals = spec.locals();
        out += "{";
        for (std::size_t i = 0; i < locals.size(); ++i) {
            out += (i ? "," : "") + spec.variables[locals[i]].name + "=" + spec.values.at(lambda[i]);
        }
        out += "}";
    }
    return out;
}

}  // namespace

std::string format_tree(const ProcessSpec& spec, const MTree& t) {
    std::string out = format_node(spec, t.state, t.lambda);
    if (t.children.empty()) {
        return out;
    }
    out += "(";
    for (std::size_t i = 0; i < t.children.size(); ++i) {
        out += (i ? " " : "") + std::to_string(t.counts[i]) + "*" + format_tree(spec, t.children[i]);
    }
    return out + ")";
}

std::string format_tree(const ProcessSpec& spec, const STree& t) {
    std::string out = format_node(spec, t.state, t.lambda);
    if (t.children.empty()) {
        return out;
    }
    out += "{";
    for (std::size_t i = 0; i < t.children.size(); ++i) {
        out += (i ? " " : "") + format_tree(spec, t.children[i]);
    }
    return out + "}";
}

std::string format_trace(const ProcessSpec& spec, const ReachReport& report) {
    std::string out;
    for (const auto& s : report.run) {
        out += format_label(spec, s.label) + "\t" + s.tree + "\n";
    }
    return out;
}

}  // namespace dpp
