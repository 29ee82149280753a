#include "dpp/model.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace dpp {

std::strong_ordering ExtWord::operator<=>(const ExtWord& other) const {
    if (auto c = head <=> other.head; c != 0) {
        return c;
    }
    if (auto c = body.size() <=> other.body.size(); c != 0) {
        return c;
    }
    return body <=> other.body;
}

std::vector<VarId> ProcessSpec::locals() const {
    std::vector<VarId> out;
    for (VarId x = 0; x < variables.size(); ++x) {
        if (variables[x].scope == Scope::local) {
            out.push_back(x);
        }
    }
    return out;
}

std::vector<VarId> ProcessSpec::globals() const {
    std::vector<VarId> out;
    for (VarId x = 0; x < variables.size(); ++x) {
        if (variables[x].scope == Scope::global) {
            out.push_back(x);
        }
    }
    return out;
}

std::vector<ValueId> ProcessSpec::initial_valuation() const {
    return std::vector<ValueId>(num_locals_, init_value);
}

namespace {

template <typename T>
std::optional<std::uint32_t> find_name(const std::vector<T>& names, std::string_view name) {
    auto it = std::lower_bound(names.begin(), names.end(), name);
    if (it == names.end() || *it != name) {
        return std::nullopt;
    }
    return static_cast<std::uint32_t>(it - names.begin());
}

}  // namespace

std::optional<ValueId> ProcessSpec::find_value(std::string_view name) const {
    return find_name(values, name);
}

std::optional<VarId> ProcessSpec::find_variable(std::string_view name) const {
    auto it = std::lower_bound(variables.begin(), variables.end(), name,
                               [](const Variable& v, std::string_view n) { return v.name < n; });
    if (it == variables.end() || it->name != name) {
        return std::nullopt;
    }
    return static_cast<VarId>(it - variables.begin());
}

std::optional<ControlId> ProcessSpec::find_control(std::string_view name) const {
    return find_name(controls, name);
}

std::optional<SymbolId> ProcessSpec::find_symbol(std::string_view name) const {
    return find_name(stack_symbols, name);
}

std::optional<TargetId> ProcessSpec::find_target(const StateId& s) const {
    auto it = std::lower_bound(spawn_targets.begin(), spawn_targets.end(), s);
    if (it == spawn_targets.end() || *it != s) {
        return std::nullopt;
    }
    return static_cast<TargetId>(it - spawn_targets.begin());
}

void ProcessSpec::finalize() {
    local_slot_.assign(variables.size(), 0);
    num_locals_ = 0;
    for (VarId x = 0; x < variables.size(); ++x) {
        if (variables[x].scope == Scope::local) {
            local_slot_[x] = num_locals_++;
        }
    }
}

// --- builder ---------------------------------------------------------------

SpecBuilder& SpecBuilder::kind(ProcessKind k) {
    kind_ = k;
    return *this;
}
SpecBuilder& SpecBuilder::values(std::vector<std::string> names) {
    values_ = std::move(names);
    return *this;
}
SpecBuilder& SpecBuilder::init_value(std::string name) {
    init_value_ = std::move(name);
    return *this;
}
SpecBuilder& SpecBuilder::target(std::string name) {
    target_ = std::move(name);
    return *this;
}
SpecBuilder& SpecBuilder::globals(std::vector<std::string> names) {
    globals_ = std::move(names);
    return *this;
}
SpecBuilder& SpecBuilder::locals(std::vector<std::string> names) {
    locals_ = std::move(names);
    return *this;
}
SpecBuilder& SpecBuilder::stack_symbols(std::vector<std::string> names) {
    stack_ = std::move(names);
    return *this;
}
SpecBuilder& SpecBuilder::states(std::vector<std::string> names) {
    states_ = std::move(names);
    return *this;
}
SpecBuilder& SpecBuilder::init(std::string control, std::vector<std::string> stack) {
    init_control_ = std::move(control);
    init_stack_ = std::move(stack);
    return *this;
}
SpecBuilder& SpecBuilder::rule(RuleText r) {
    rules_.push_back(std::move(r));
    return *this;
}

namespace {

std::vector<std::string> sorted_unique(const std::vector<std::string>& names, const char* what) {
    std::vector<std::string> out = names;
    std::sort(out.begin(), out.end());
    auto dup = std::adjacent_find(out.begin(), out.end());
    if (dup != out.end()) {
        throw ValidationError(std::string("duplicate ") + what + " '" + *dup + "'");
    }
    return out;
}

}  // namespace

ProcessSpec SpecBuilder::build() const {
    ProcessSpec spec;
    spec.kind = kind_;

    spec.values = sorted_unique(values_, "value");
    if (spec.values.empty()) {
        throw ValidationError("value set is empty");
    }
    if (!init_value_) {
        throw ValidationError("init_value is not declared");
    }
    if (!target_) {
        throw ValidationError("target is not declared");
    }
    auto value_id = [&](const std::string& name) {
        auto v = spec.find_value(name);
        if (!v) {
            throw ValidationError("undeclared value '" + name + "'");
        }
        return *v;
    };
    {
        auto v = spec.find_value(*init_value_);
        if (!v) {
            throw ValidationError("init_value '" + *init_value_ + "' is not in values");
        }
        spec.init_value = *v;
        auto t = spec.find_value(*target_);
        if (!t) {
            throw ValidationError("target '" + *target_ + "' is not in values");
        }
        spec.target = *t;
    }

    {
        std::vector<std::string> all = globals_;
        all.insert(all.end(), locals_.begin(), locals_.end());
        std::set<std::string> global_set(globals_.begin(), globals_.end());
        for (const auto& name : sorted_unique(all, "variable")) {
            spec.variables.push_back({name, global_set.count(name) ? Scope::global : Scope::local});
        }
    }
    spec.finalize();

    spec.stack_symbols = sorted_unique(stack_, "stack symbol");
    if (kind_ == ProcessKind::finite && !spec.stack_symbols.empty()) {
        throw ValidationError("finite process declares a stack alphabet");
    }

    // Controls: declared explicitly, or collected from init and rules.
    std::set<std::string> controls;
    std::vector<std::string> declared_states;
    if (states_) {
        declared_states = sorted_unique(*states_, "state");
        controls.insert(declared_states.begin(), declared_states.end());
    }
    const std::vector<std::string>* decl = states_ ? &declared_states : nullptr;
    auto check_control = [&](const std::string& name) {
        if (name.empty()) {
            throw ValidationError("empty state name");
        }
        if (decl && !std::binary_search(decl->begin(), decl->end(), name)) {
            throw ValidationError("undeclared state '" + name + "'");
        }
        controls.insert(name);
    };
    if (!init_control_) {
        throw ValidationError("init is not declared");
    }
    check_control(*init_control_);
    for (const auto& r : rules_) {
        check_control(r.from);
        check_control(r.to);
        if (r.label.kind == LabelKind::spawn) {
            check_control(r.label.target_control);
        }
    }
    spec.controls.assign(controls.begin(), controls.end());

    auto control_id = [&](const std::string& name) { return *spec.find_control(name); };
    auto symbols = [&](const std::vector<std::string>& names) {
        std::vector<SymbolId> out;
        for (const auto& n : names) {
            auto s = spec.find_symbol(n);
            if (!s) {
                throw ValidationError("undeclared stack symbol '" + n + "'");
            }
            out.push_back(*s);
        }
        return out;
    };
    auto state_of = [&](const std::string& control, const std::vector<std::string>& stack) {
        if (kind_ == ProcessKind::finite && !stack.empty()) {
            throw ValidationError("finite process state '" + control + "' carries a stack");
        }
        return StateId{control_id(control), symbols(stack)};
    };

    spec.init = state_of(*init_control_, init_stack_);

    std::set<StateId> targets;
    for (const auto& r : rules_) {
        if (r.label.kind == LabelKind::spawn) {
            targets.insert(state_of(r.label.target_control, r.label.target_stack));
        }
    }
    spec.spawn_targets.assign(targets.begin(), targets.end());

    for (const auto& r : rules_) {
        Rule rule;
        rule.from = control_id(r.from);
        rule.to = control_id(r.to);
        if (kind_ == ProcessKind::finite && (!r.pop.empty() || !r.push.empty())) {
            throw ValidationError("finite process rule uses pop/push");
        }
        if (r.pop.size() > 1) {
            throw ValidationError("rule from '" + r.from + "' pops more than one symbol");
        }
        if (!r.pop.empty()) {
            rule.pop = symbols(r.pop).front();
        }
        rule.push = symbols(r.push);

        const LabelText& lt = r.label;
        ActionLabel a;
        a.kind = lt.kind;
        switch (lt.kind) {
        case LabelKind::tau:
            break;
        case LabelKind::spawn:
            a.target = *spec.find_target(state_of(lt.target_control, lt.target_stack));
            break;
        case LabelKind::bar_read:
        case LabelKind::bar_write:
            throw ValidationError("barred labels cannot occur in rules");
        default: {
            auto x = spec.find_variable(lt.var);
            if (!x) {
                throw ValidationError("undeclared variable '" + lt.var + "'");
            }
            if ((lt.kind == LabelKind::input || lt.kind == LabelKind::output) && !spec.is_local(*x)) {
                throw ValidationError("input/output on global variable '" + lt.var + "'");
            }
            a.var = *x;
            a.value = value_id(lt.value);
            break;
        }
        }
        rule.label = a;
        spec.rules.push_back(std::move(rule));
    }
    return spec;
}

// --- classification and projections ------------------------------------------

FragmentTags classify(const ProcessSpec& spec) {
    FragmentTags tags;
    tags.no_locals = spec.num_locals() == 0;
    bool own_local_write = false;
    bool inputs = false;
    bool touches_init = false;
    for (const auto& r : spec.rules) {
        const auto& a = r.label;
        switch (a.kind) {
        case LabelKind::write:
            own_local_write = own_local_write || spec.is_local(a.var);
            [[fallthrough]];
        case LabelKind::read:
        case LabelKind::output:
            touches_init = touches_init || a.value == spec.init_value;
            break;
        case LabelKind::input:
            inputs = true;
            touches_init = touches_init || a.value == spec.init_value;
            break;
        default:
            break;
        }
    }
    tags.generalized_futures = spec.globals().empty() && !own_local_write;
    tags.simple_futures = tags.generalized_futures && !inputs;
    tags.proviso_ok = !touches_init;
    return tags;
}

std::optional<Action> ext_of(const ProcessSpec& spec, const ActionLabel& a) {
    switch (a.kind) {
    case LabelKind::read:
    case LabelKind::bar_read:
        if (spec.is_global(a.var)) {
            return Action{ActionKind::read, a.var, a.value};
        }
        return std::nullopt;
    case LabelKind::write:
    case LabelKind::bar_write:
        if (spec.is_global(a.var)) {
            return Action{ActionKind::write, a.var, a.value};
        }
        return std::nullopt;
    case LabelKind::input:
        return Action{ActionKind::input, a.var, a.value};
    case LabelKind::output:
        return Action{ActionKind::output, a.var, a.value};
    default:
        return std::nullopt;
    }
}

std::vector<Action> ext_project(const ProcessSpec& spec, std::span<const ActionLabel> word) {
    std::vector<Action> out;
    for (const auto& a : word) {
        if (auto e = ext_of(spec, a)) {
            out.push_back(*e);
        }
    }
    return out;
}

Word filter_project(const ProcessSpec& spec, std::span<const ActionLabel> word) {
    Word out;
    for (const auto& a : word) {
        switch (a.kind) {
        case LabelKind::bar_read:
            out.push_back(spec.is_global(a.var) ? ActionLabel::read(a.var, a.value)
                                                : ActionLabel::input(a.var, a.value));
            break;
        case LabelKind::bar_write:
            out.push_back(spec.is_global(a.var) ? ActionLabel::write(a.var, a.value)
                                                : ActionLabel::output(a.var, a.value));
            break;
        case LabelKind::spawn:
            out.push_back(a);
            break;
        default:
            break;
        }
    }
    return out;
}

bool is_target_label(const ProcessSpec& spec, const ActionLabel& a) {
    auto e = ext_of(spec, a);
    return e && e->value == spec.target &&
           (e->kind == ActionKind::write || e->kind == ActionKind::output);
}

ActionLabel label_of(const Action& a) {
    switch (a.kind) {
    case ActionKind::read:
        return ActionLabel::read(a.var, a.value);
    case ActionKind::write:
        return ActionLabel::write(a.var, a.value);
    case ActionKind::input:
        return ActionLabel::input(a.var, a.value);
    case ActionKind::output:
        return ActionLabel::output(a.var, a.value);
    }
    return {};
}

std::vector<ActionLabel> rule_alphabet(const ProcessSpec& spec) {
    std::vector<ActionLabel> out;
    for (const auto& r : spec.rules) {
        out.push_back(r.label);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<ActionLabel> barred_alphabet(const ProcessSpec& spec) {
    std::vector<ActionLabel> out;
    for (VarId x = 0; x < spec.variables.size(); ++x) {
        for (ValueId v = 0; v < spec.values.size(); ++v) {
            out.push_back(ActionLabel::bar_read(x, v));
            out.push_back(ActionLabel::bar_write(x, v));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<ActionLabel> full_alphabet(const ProcessSpec& spec) {
    std::vector<ActionLabel> out = barred_alphabet(spec);
    out.push_back(ActionLabel::tau());
    for (VarId x = 0; x < spec.variables.size(); ++x) {
        for (ValueId v = 0; v < spec.values.size(); ++v) {
            out.push_back(ActionLabel::read(x, v));
            out.push_back(ActionLabel::write(x, v));
            if (spec.is_local(x)) {
                out.push_back(ActionLabel::input(x, v));
                out.push_back(ActionLabel::output(x, v));
            }
        }
    }
    for (TargetId p = 0; p < spec.spawn_targets.size(); ++p) {
        out.push_back(ActionLabel::spawn(p));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<RuleStep> rule_steps(const ProcessSpec& spec, const StateId& s) {
    std::vector<RuleStep> out;
    for (std::size_t i = 0; i < spec.rules.size(); ++i) {
        const Rule& r = spec.rules[i];
        if (r.from != s.control) {
            continue;
        }
        std::size_t popped = 0;
        if (r.pop) {
            if (s.stack.empty() || s.stack.front() != *r.pop) {
                continue;
            }
            popped = 1;
        }
        StateId to{r.to, r.push};
        to.stack.insert(to.stack.end(), s.stack.begin() + static_cast<std::ptrdiff_t>(popped), s.stack.end());
        out.push_back({i, std::move(to)});
    }
    return out;
}

// --- formatting ----------------------------------------------------------------

std::string format_state(const ProcessSpec& spec, const StateId& s) {
    std::string out = spec.controls.at(s.control);
    if (spec.kind == ProcessKind::pushdown) {
        out += " [";
        for (std::size_t i = 0; i < s.stack.size(); ++i) {
            if (i) {
                out += ' ';
            }
            out += spec.stack_symbols.at(s.stack[i]);
        }
        out += ']';
    }
    return out;
}

namespace {

std::string var_value(const ProcessSpec& spec, VarId x, ValueId v) {
    return "(" + spec.variables.at(x).name + "," + spec.values.at(v) + ")";
}

}  // namespace

std::string format_label(const ProcessSpec& spec, const ActionLabel& a) {
    switch (a.kind) {
    case LabelKind::tau:
        return "tau";
    case LabelKind::read:
        return "r" + var_value(spec, a.var, a.value);
    case LabelKind::write:
        return "w" + var_value(spec, a.var, a.value);
    case LabelKind::input:
        return "i" + var_value(spec, a.var, a.value);
    case LabelKind::output:
        return "o" + var_value(spec, a.var, a.value);
    case LabelKind::bar_read:
        return "rbar" + var_value(spec, a.var, a.value);
    case LabelKind::bar_write:
        return "wbar" + var_value(spec, a.var, a.value);
    case LabelKind::spawn:
        return "spawn(" + format_state(spec, spec.spawn_targets.at(a.target)) + ")";
    }
    return "?";
}

std::string format_action(const ProcessSpec& spec, const Action& a) {
    return format_label(spec, label_of(a));
}

std::string format_word(const ProcessSpec& spec, const ExtWord& w) {
    std::string out;
    if (w.head) {
        out = "spawn(" + format_state(spec, *w.head) + ")";
    }
    for (const auto& a : w.body) {
        if (!out.empty()) {
            out += ' ';
        }
        out += format_action(spec, a);
    }
    return out.empty() ? "eps" : out;
}

std::string format_labels(const ProcessSpec& spec, std::span<const ActionLabel> word) {
    std::string out;
    for (const auto& a : word) {
        if (!out.empty()) {
            out += ' ';
        }
        out += format_label(spec, a);
    }
    return out.empty() ? "eps" : out;
}

}  // namespace dpp
