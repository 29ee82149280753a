#pragma once

// Process model: dynamic parametric processes, their label alphabets, the
// ext/filter projections and fragment classification.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpp/errors.hpp"

namespace dpp {

using ValueId = std::uint32_t;
using VarId = std::uint32_t;
using ControlId = std::uint32_t;
using SymbolId = std::uint32_t;
using TargetId = std::uint32_t;

enum class ProcessKind : std::uint8_t { finite, pushdown };

/// A process state. For finite processes the stack is always empty.
/// Stack words are stored top-first, in the order they are written.
struct StateId {
    ControlId control = 0;
    std::vector<SymbolId> stack;

    auto operator<=>(const StateId&) const = default;
};

enum class LabelKind : std::uint8_t { tau, read, write, input, output, spawn, bar_read, bar_write };

struct ActionLabel {
    LabelKind kind = LabelKind::tau;
    VarId var = 0;
    ValueId value = 0;
    TargetId target = 0;  // index into ProcessSpec::spawn_targets, spawn only

    static ActionLabel tau() { return {}; }
    static ActionLabel read(VarId x, ValueId v) { return {LabelKind::read, x, v, 0}; }
    static ActionLabel write(VarId x, ValueId v) { return {LabelKind::write, x, v, 0}; }
    static ActionLabel input(VarId x, ValueId v) { return {LabelKind::input, x, v, 0}; }
    static ActionLabel output(VarId x, ValueId v) { return {LabelKind::output, x, v, 0}; }
    static ActionLabel spawn(TargetId p) { return {LabelKind::spawn, 0, 0, p}; }
    static ActionLabel bar_read(VarId x, ValueId v) { return {LabelKind::bar_read, x, v, 0}; }
    static ActionLabel bar_write(VarId x, ValueId v) { return {LabelKind::bar_write, x, v, 0}; }

    auto operator<=>(const ActionLabel&) const = default;
};

/// External action: r/w on a global, i/o on a local of the parent.
/// The enumerator order is the tie-breaking order used everywhere words are sorted.
enum class ActionKind : std::uint8_t { read, write, input, output };

struct Action {
    ActionKind kind = ActionKind::read;
    VarId var = 0;
    ValueId value = 0;

    auto operator<=>(const Action&) const = default;
};

/// A word of external actions, optionally headed by spawn(p).
/// Ordered by head, then length, then lexicographically.
struct ExtWord {
    std::optional<StateId> head;
    std::vector<Action> body;

    bool operator==(const ExtWord&) const = default;
    std::strong_ordering operator<=>(const ExtWord& other) const;
};

using Word = std::vector<ActionLabel>;

enum class Scope : std::uint8_t { local, global };

struct Variable {
    std::string name;
    Scope scope = Scope::local;
};

/// A (normalized) rule. Finite processes never pop or push.
struct Rule {
    ControlId from = 0;
    std::optional<SymbolId> pop;
    ActionLabel label;
    ControlId to = 0;
    std::vector<SymbolId> push;  // top-first
};

/// All names are interned in sorted order, so id order is name order.
class ProcessSpec {
public:
    ProcessKind kind = ProcessKind::finite;
    std::vector<std::string> values;
    ValueId init_value = 0;
    ValueId target = 0;
    std::vector<Variable> variables;
    std::vector<std::string> controls;
    std::vector<std::string> stack_symbols;
    StateId init;
    std::vector<StateId> spawn_targets;
    std::vector<Rule> rules;

    bool is_global(VarId x) const { return variables.at(x).scope == Scope::global; }
    bool is_local(VarId x) const { return variables.at(x).scope == Scope::local; }
    std::vector<VarId> locals() const;
    std::vector<VarId> globals() const;
    std::size_t num_locals() const { return num_locals_; }
    /// Position of a local in a valuation vector.
    std::size_t local_slot(VarId x) const { return local_slot_.at(x); }
    /// Valuation mapping every local to the initial value.
    std::vector<ValueId> initial_valuation() const;

    std::optional<ValueId> find_value(std::string_view name) const;
    std::optional<VarId> find_variable(std::string_view name) const;
    std::optional<ControlId> find_control(std::string_view name) const;
    std::optional<SymbolId> find_symbol(std::string_view name) const;
    std::optional<TargetId> find_target(const StateId& s) const;

    /// Recomputes derived tables; called by SpecBuilder.
    void finalize();

private:
    std::vector<std::size_t> local_slot_;
    std::size_t num_locals_ = 0;
};

struct LabelText {
    LabelKind kind = LabelKind::tau;
    std::string var;
    std::string value;
    std::string target_control;
    std::vector<std::string> target_stack;
};

struct RuleText {
    std::string from;
    std::vector<std::string> pop;
    LabelText label;
    std::string to;
    std::vector<std::string> push;
};

/// Name-based construction of a validated ProcessSpec.
class SpecBuilder {
public:
    SpecBuilder& kind(ProcessKind k);
    SpecBuilder& values(std::vector<std::string> names);
    SpecBuilder& init_value(std::string name);
    SpecBuilder& target(std::string name);
    SpecBuilder& globals(std::vector<std::string> names);
    SpecBuilder& locals(std::vector<std::string> names);
    SpecBuilder& stack_symbols(std::vector<std::string> names);
    /// Optional explicit control declarations; when given, rules may only use these.
    SpecBuilder& states(std::vector<std::string> names);
    SpecBuilder& init(std::string control, std::vector<std::string> stack = {});
    SpecBuilder& rule(RuleText r);

    /// Throws ValidationError on undeclared/duplicate names.
    ProcessSpec build() const;

private:
    ProcessKind kind_ = ProcessKind::finite;
    std::vector<std::string> values_;
    std::optional<std::string> init_value_;
    std::optional<std::string> target_;
    std::vector<std::string> globals_;
    std::vector<std::string> locals_;
    std::vector<std::string> stack_;
    std::optional<std::vector<std::string>> states_;
    std::optional<std::string> init_control_;
    std::vector<std::string> init_stack_;
    std::vector<RuleText> rules_;
};

struct FragmentTags {
    bool no_locals = false;
    bool generalized_futures = false;
    bool simple_futures = false;
    bool proviso_ok = false;

    bool operator==(const FragmentTags&) const = default;
};

/// Parses the line-oriented or JSON process format (auto-detected).
ProcessSpec parse_process(std::string_view text);
ProcessSpec load_process(const std::string& path);
/// Renders the line-oriented format; parse_process(to_text(s)) rebuilds s.
std::string to_text(const ProcessSpec& spec);

FragmentTags classify(const ProcessSpec& spec);

struct RuleStep {
    std::size_t rule = 0;
    StateId to;
};
/// Rules enabled in s (control and stack top) with the resulting states.
std::vector<RuleStep> rule_steps(const ProcessSpec& spec, const StateId& s);

/// ext projection of a single label; nullopt for erased labels.
std::optional<Action> ext_of(const ProcessSpec& spec, const ActionLabel& a);
std::vector<Action> ext_project(const ProcessSpec& spec, std::span<const ActionLabel> word);
/// filter projection: barred locals become i/o, barred globals become r/w, spawns kept.
Word filter_project(const ProcessSpec& spec, std::span<const ActionLabel> word);

bool is_target_label(const ProcessSpec& spec, const ActionLabel& a);

/// Every label the spec can produce: its rule labels, all r/w/i/o/barred
/// combinations over its variables and values, and its spawns. Sorted.
std::vector<ActionLabel> full_alphabet(const ProcessSpec& spec);
/// Labels occurring in rules, sorted and unique.
std::vector<ActionLabel> rule_alphabet(const ProcessSpec& spec);
/// Barred labels over all variables and values, sorted.
std::vector<ActionLabel> barred_alphabet(const ProcessSpec& spec);

ActionLabel label_of(const Action& a);

std::string format_state(const ProcessSpec& spec, const StateId& s);
std::string format_label(const ProcessSpec& spec, const ActionLabel& a);
std::string format_action(const ProcessSpec& spec, const Action& a);
std::string format_word(const ProcessSpec& spec, const ExtWord& w);
std::string format_labels(const ProcessSpec& spec, std::span<const ActionLabel> word);

/// Parses "spawn(p) i(x,1) o(x,2)" (head optional) against the spec's names.
ExtWord parse_ext_word(const ProcessSpec& spec, std::string_view text);
ActionLabel parse_label(const ProcessSpec& spec, std::string_view text);

}  // namespace dpp
