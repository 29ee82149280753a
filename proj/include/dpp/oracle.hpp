#pragma once

// Bounded explorers for the multiset and set semantics, used as reference
// oracles and witness validators.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "dpp/model.hpp"

namespace dpp {

/// Configuration tree with a multiset of children. Children are sorted and
/// distinct; counts[i] is the multiplicity of children[i].
struct MTree {
    StateId state;
    std::vector<ValueId> lambda;
    std::vector<MTree> children;
    std::vector<std::uint32_t> counts;

    bool operator==(const MTree&) const = default;
    std::strong_ordering operator<=>(const MTree& other) const;
    std::size_t size() const;  // number of nodes, multiplicities included
};

/// Configuration tree with a set of children, sorted and distinct.
struct STree {
    StateId state;
    std::vector<ValueId> lambda;
    std::vector<STree> children;

    bool operator==(const STree&) const = default;
    std::strong_ordering operator<=>(const STree& other) const;
};

/// max_children_per_node bounds multiset copies only; set children are bounded by depth.
struct ExploreBounds {
    std::size_t max_depth = 3;
    std::size_t max_children_per_node = 3;
    std::size_t max_steps = 30;
    std::size_t max_stack_height = 8;
    std::size_t max_states = 500'000;
};

struct TraceStep {
    ActionLabel label;
    std::string tree;  // rendering of the tree after the step
};

struct ReachReport {
    bool found = false;
    std::vector<TraceStep> run;  // witness, when found
    std::size_t explored = 0;
    std::size_t frontier = 0;   // configurations cut off by the step bound
    bool truncated = false;     // state cap or other bound hit

    std::vector<ActionLabel> labels() const;
};

MTree initial_mtree(const ProcessSpec& spec, const StateId& start);
STree initial_stree(const ProcessSpec& spec, const StateId& start);

/// Successors of t, the root of a tree at the given depth (root depth 0).
std::vector<std::pair<ActionLabel, MTree>> mtree_successors(const MTree& t, const ProcessSpec& spec,
                                                            const ExploreBounds& bounds, std::size_t depth = 0);
std::vector<std::pair<ActionLabel, STree>> stree_successors(const STree& s, const ProcessSpec& spec,
                                                            const ExploreBounds& bounds, std::size_t depth = 0);

/// Breadth-first search over consistent runs until a root label writes or outputs the target.
ReachReport explore_multiset(const ProcessSpec& spec, const ExploreBounds& bounds);
ReachReport explore_set(const ProcessSpec& spec, const ExploreBounds& bounds);

/// All (state, lambda) pairs of the root reachable by set-semantics runs from start.
std::set<std::pair<StateId, std::vector<ValueId>>> root_configurations(const ProcessSpec& spec,
                                                                      const StateId& start,
                                                                      const ExploreBounds& bounds,
                                                                      bool consistent = false);

/// spawn(start) ext(alpha) for set-semantics runs alpha from start with |ext(alpha)| <= max_length.
std::set<ExtWord> enumerate_ext_words(const ProcessSpec& spec, const StateId& start,
                                      const ExploreBounds& bounds, std::size_t max_length,
                                      bool consistent = false);

bool stree_leq(const STree& a, const STree& b);
STree set_of(const MTree& t);

std::string format_tree(const ProcessSpec& spec, const MTree& t);
std::string format_tree(const ProcessSpec& spec, const STree& t);
/// One line per step: label, tab, tree.
std::string format_trace(const ProcessSpec& spec, const ReachReport& report);

/// Tracks global statuses; read(v) is allowed if the status is v, or untouched and v is initial.
class ConsistencyMonitor {
public:
    explicit ConsistencyMonitor(const ProcessSpec& spec);
    std::vector<ValueId> initial() const;
    /// Applies a root label; returns false if it is inconsistent.
    bool apply(std::vector<ValueId>& status, const ActionLabel& a) const;

private:
    const ProcessSpec& spec_;
    std::vector<std::size_t> slot_;
    ValueId untouched_;
};

/// Whether a sequence of root labels is consistent.
bool is_consistent(const ProcessSpec& spec, const std::vector<ActionLabel>& labels);

}  // namespace dpp
