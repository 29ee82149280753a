#pragma once

// Admissible automata: finite automata, pushdown systems, their products and
// emptiness checks with witnesses.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dpp/model.hpp"

namespace dpp {

using FState = std::uint32_t;

std::uint64_t label_key(const ActionLabel& a);

/// Epsilon-free finite automaton whose states may be created on demand.
class FiniteView {
public:
    virtual ~FiniteView() = default;
    virtual FState initial() = 0;
    virtual bool accepting(FState s) = 0;
    /// Appends all a-successors of s to out.
    virtual void step(FState s, const ActionLabel& a, std::vector<FState>& out) = 0;
    virtual std::string describe(FState s) { return std::to_string(s); }
};

/// Explicit finite automaton.
class FiniteAutomaton : public FiniteView {
public:
    FiniteAutomaton() = default;
    FiniteAutomaton(std::size_t states, std::vector<ActionLabel> alphabet);

    std::size_t num_states() const { return accepting_.size(); }
    FState add_state(bool accepting = false);
    void set_initial(FState s) { initial_ = s; }
    void set_accepting(FState s, bool value = true) { accepting_.at(s) = value; }
    /// Throws AlphabetError if a is not in the alphabet.
    void add_transition(FState from, const ActionLabel& a, FState to);

    const std::vector<ActionLabel>& alphabet() const { return alphabet_; }
    bool in_alphabet(const ActionLabel& a) const;
    struct Edge {
        ActionLabel label;
        FState to;
    };
    const std::vector<Edge>& edges(FState s) const { return edges_.at(s); }
    FState initial_state() const { return initial_; }
    bool is_accepting(FState s) const { return accepting_.at(s); }

    FState initial() override { return initial_; }
    bool accepting(FState s) override { return accepting_.at(s); }
    void step(FState s, const ActionLabel& a, std::vector<FState>& out) override;

    /// Membership by subset simulation.
    bool accepts(const std::vector<ActionLabel>& word) const;

private:
    std::vector<ActionLabel> alphabet_;
    std::vector<bool> accepting_;
    std::vector<std::vector<Edge>> edges_;
    std::vector<std::unordered_map<std::uint64_t, std::vector<FState>>> index_;
    FState initial_ = 0;
};

struct TupleHash {
    std::size_t operator()(const std::vector<std::uint32_t>& v) const {
        std::size_t h = v.size();
        for (std::uint32_t x : v) {
            h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

/// Product of several views; tuple states are interned on demand.
class ProductView : public FiniteView {
public:
    explicit ProductView(std::vector<std::shared_ptr<FiniteView>> parts);

    FState initial() override;
    bool accepting(FState s) override;
    void step(FState s, const ActionLabel& a, std::vector<FState>& out) override;
    std::string describe(FState s) override;

    const std::vector<FState>& components(FState s) const { return states_.at(s); }
    std::size_t size() const { return states_.size(); }

private:
    FState intern(const std::vector<FState>& tuple);

    std::vector<std::shared_ptr<FiniteView>> parts_;
    std::vector<std::vector<FState>> states_;
    std::unordered_map<std::vector<FState>, FState, TupleHash> ids_;
    std::vector<std::vector<FState>> scratch_;
    std::vector<FState> tuple_;
};

/// Single accepting state with a self-loop on every label.
class UniversalView : public FiniteView {
public:
    FState initial() override { return 0; }
    bool accepting(FState) override { return true; }
    void step(FState s, const ActionLabel&, std::vector<FState>& out) override { out.push_back(s); }
};

/// Rule ids >= 0 refer to rules of the originating spec; negative ids are
/// synthetic (alphabet self-loops, flattening scaffolds).
struct PdsRule {
    ControlId from = 0;
    std::optional<SymbolId> pop;
    ActionLabel label;
    ControlId to = 0;
    std::vector<SymbolId> push;
    std::int64_t id = 0;
};

/// Pushdown system over ActionLabel; acceptance is by control state.
/// A system without pops and pushes is a finite automaton.
struct Pds {
    std::size_t num_controls = 0;
    std::size_t num_symbols = 0;
    std::vector<ActionLabel> alphabet;
    std::vector<PdsRule> rules;
    std::vector<bool> accepting;

    bool is_finite() const;
};

/// The automaton associated with a spec: its rules, every state accepting.
Pds associated_automaton(const ProcessSpec& spec);

/// A-circlearrowleft-extra: self-loops (pop-0 rules) on every extra letter.
/// Throws AlphabetError if extra meets the existing alphabet.
Pds alphabet_extend(const Pds& pds, const std::vector<ActionLabel>& extra);
FiniteAutomaton alphabet_extend(const FiniteAutomaton& fa, const std::vector<ActionLabel>& extra);

/// Explicit product; throws AlphabetError when alphabets differ.
FiniteAutomaton product_with_finite(const FiniteAutomaton& a, const FiniteAutomaton& b);

struct Witness {
    std::vector<ActionLabel> labels;
    std::vector<std::int64_t> rule_trace;
};

/// Synchronized product of a pushdown system with a (lazy) finite factor.
struct AdmissibleAutomaton {
    const Pds* pds = nullptr;
    std::shared_ptr<FiniteView> view;
};

AdmissibleAutomaton product_with_finite(const AdmissibleAutomaton& a, std::shared_ptr<FiniteView> fa);

struct EmptinessStats {
    std::size_t explored = 0;
};

/// Emptiness with witness from start = (configuration of the pds, initial state of the view).
/// Finite systems use BFS; pushdown systems use pre* saturation. max_states bounds the
/// explored product (or materialized finite factor); exceeding it throws ResourceExceeded.
std::optional<Witness> nonempty_witness(const AdmissibleAutomaton& automaton, const StateId& start,
                                        std::size_t max_states = 2'000'000,
                                        EmptinessStats* stats = nullptr);
std::optional<Witness> nonempty_witness(const Pds& pds, const StateId& start);
/// Explicit automata only; lazy views take the alphabet to explore.
std::optional<Witness> nonempty_witness(FiniteView& fa);
std::optional<Witness> nonempty_witness(FiniteView& fa, const std::vector<ActionLabel>& alphabet);

/// Replays rule_trace from start, checking labels and final acceptance.
bool replay(const AdmissibleAutomaton& automaton, const StateId& start, const Witness& w);
bool replay(const Pds& pds, const StateId& start, const Witness& w);

/// P-automaton for pre*: states 0..num_controls-1 are pds controls, then the final
/// sink, then states of split push rules. Stack symbol num_symbols is the
/// bottom-of-stack marker appended to every configuration.
struct PAutomaton {
    struct Transition {
        std::uint32_t from;
        SymbolId symbol;
        std::uint32_t to;
        std::int64_t rule = -1;           // index into expanded rules, -1 for initial
        std::vector<std::uint32_t> path;  // transitions the rule was applied to
    };
    std::size_t num_states = 0;
    std::uint32_t final_state = 0;
    std::vector<Transition> transitions;
};

/// Saturates the P-automaton recognizing all accepting configurations (any stack)
/// into one recognizing their pre* under the rules.
class PreStar {
public:
    explicit PreStar(const Pds& pds);

    bool accepts(const StateId& config) const;
    std::optional<Witness> witness(const StateId& config) const;
    const PAutomaton& automaton() const { return pa_; }

private:
    struct Expanded {
        std::uint32_t from;
        SymbolId pop;
        std::uint32_t to;
        std::vector<SymbolId> push;  // length <= 2
        std::int64_t origin;         // index into pds.rules, -1 for split continuations
    };
    std::optional<std::vector<std::uint32_t>> accepting_path(const StateId& config) const;
    void saturate();

    const Pds& pds_;
    PAutomaton pa_;
    std::vector<Expanded> rules_;
};

/// Accepts every run whose labels keep each global consistent: reads see the
/// last written value, or the initial value before any write.
FiniteAutomaton consistency_automaton(const ProcessSpec& spec);
/// Words whose ext-projection equals beta.
FiniteAutomaton ext_equals_automaton(const ProcessSpec& spec, const std::vector<Action>& beta);
/// Words w with beta not below ext(w) in the lift order (the head is fixed by the caller).
FiniteAutomaton not_dominating_automaton(const ProcessSpec& spec, const ExtWord& beta);
/// Two states; accepting once a label with ext w(g,#) or o(x,#) has been read.
FiniteAutomaton target_automaton(const ProcessSpec& spec);

std::string to_dot(const ProcessSpec& spec, const FiniteAutomaton& fa, const std::string& name = "A");
std::string to_dot(const Pds& pds, const PAutomaton& pa, const std::string& name = "P");

}  // namespace dpp
