#pragma once

// Systems under hypothesis: child subtrees replaced by a language of assumed
// external behaviours, tracked in a prefix-closed set B.

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "dpp/automata.hpp"
#include "dpp/model.hpp"

namespace dpp {

using NodeId = std::uint32_t;

/// A finite hypothesis stored as a trie over (spawn head, action sequence).
/// Node 0 is the root; every other node is a member of pref(L).
class Hypothesis {
public:
    Hypothesis();
    /// Throws InvalidHypothesis for words without a spawn head.
    explicit Hypothesis(const std::set<ExtWord>& words);

    void insert(const ExtWord& w);

    const std::set<ExtWord>& words() const { return words_; }
    bool empty() const { return words_.empty(); }
    std::size_t num_nodes() const { return nodes_.size(); }

    std::optional<NodeId> head_node(const StateId& p) const;
    std::optional<NodeId> child(NodeId n, const Action& a) const;
    /// Node of w in pref(L), if any.
    std::optional<NodeId> find(const ExtWord& w) const;
    bool in_prefixes(const ExtWord& w) const { return find(w).has_value(); }
    ExtWord word_of(NodeId n) const;

private:
    struct Node {
        NodeId parent = 0;
        std::map<Action, NodeId> children;
    };
    std::vector<Node> nodes_;
    std::vector<Action> action_;        // action leading into each node (unused for heads)
    std::vector<StateId> head_;         // head of the word each node spells
    std::map<StateId, NodeId> heads_;
    std::set<ExtWord> words_;
};

/// How barred steps pick the set B' of extended members.
/// maximal: every extendable member at once (deterministic, same label language).
/// full_subset: every nonempty subset, the literal transition rule.
enum class ExtensionMode : std::uint8_t { maximal, full_subset };

/// Local valuation (indexed by local slot) and B as sorted trie nodes.
struct HypContext {
    std::vector<ValueId> lambda;
    std::vector<NodeId> B;

    auto operator<=>(const HypContext&) const = default;
};

struct HypState {
    StateId state;
    HypContext ctx;

    auto operator<=>(const HypState&) const = default;
};

HypState initial_hyp_state(const ProcessSpec& spec, const StateId& p);

/// Successor contexts of ctx under a label, ignoring the process state.
void hyp_context_step(const ProcessSpec& spec, const Hypothesis& L, const HypContext& ctx,
                      const ActionLabel& a, ExtensionMode mode, std::vector<HypContext>& out);

/// All successors of r: rules of the spec plus barred steps backed by L.
std::vector<std::pair<ActionLabel, HypState>> hyp_successors(const HypState& r, const ProcessSpec& spec,
                                                             const Hypothesis& L,
                                                             ExtensionMode mode = ExtensionMode::maximal);

std::set<ExtWord> words_of(const Hypothesis& L, const std::vector<NodeId>& B);

/// A_L as a lazy finite automaton over contexts; every state is accepting.
class HypothesisView : public FiniteView {
public:
    HypothesisView(const ProcessSpec& spec, const Hypothesis& L, ExtensionMode mode = ExtensionMode::maximal);

    FState initial() override;
    bool accepting(FState) override { return true; }
    void step(FState s, const ActionLabel& a, std::vector<FState>& out) override;
    std::string describe(FState s) override;

    const HypContext& context(FState s) const { return contexts_.at(s); }
    std::size_t size() const { return contexts_.size(); }

private:
    FState intern(const HypContext& c);

    const ProcessSpec& spec_;
    const Hypothesis& L_;
    ExtensionMode mode_;
    std::vector<HypContext> contexts_;
    std::map<HypContext, FState> ids_;
    std::vector<std::unordered_map<std::uint64_t, std::vector<FState>>> memo_;
    std::vector<HypContext> scratch_;
};

struct CoreOptions {
    bool consistent = false;
    ExtensionMode mode = ExtensionMode::maximal;
    std::size_t max_iterations = 100'000;
    std::size_t max_states = 2'000'000;
    std::size_t max_candidates = 200'000;
};

struct CoreStats {
    std::size_t iterations = 0;
    std::size_t emptiness_checks = 0;
    std::size_t explored = 0;
};

/// core({spawn(p) ext(alpha) : (p, lambda_init, {}) -alpha-> under L}).
/// Throws ResourceExceeded when a cap is hit.
std::set<ExtWord> compute_core_K(const ProcessSpec& spec, const Hypothesis& L, const StateId& p,
                                 const CoreOptions& options = {}, CoreStats* stats = nullptr);

/// Signatures of {spawn(p) ext(alpha)} under L, prefix-closed.
std::set<ExtWord> signature_set(const ProcessSpec& spec, const Hypothesis& L, const StateId& p,
                                const CoreOptions& options = {}, CoreStats* stats = nullptr);

/// Whether some run of p under L has an action with ext equal to a.
bool can_produce(const ProcessSpec& spec, const Hypothesis& L, const StateId& p, const Action& a,
                 const CoreOptions& options = {}, CoreStats* stats = nullptr);

/// A witness run of p under L reaching the target (optionally consistent).
std::optional<Witness> target_witness(const ProcessSpec& spec, const Hypothesis& L, const StateId& p,
                                      const CoreOptions& options = {}, CoreStats* stats = nullptr);

/// Accepts once a label with ext equal to a has been read.
FiniteAutomaton produces_automaton(const ProcessSpec& spec, const Action& a);
/// Accepts words whose ext signature starts with prefix.
FiniteAutomaton signature_prefix_automaton(const ProcessSpec& spec, const std::vector<Action>& prefix);

}  // namespace dpp
