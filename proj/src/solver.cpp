#include "dpp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <future>
#include <sstream>

#include <json.hpp>

#include "dpp/words.hpp"

namespace dpp {

std::string to_string(VerdictKind k) {
    switch (k) {
        case VerdictKind::reachable:
            return "Reachable";
        case VerdictKind::unreachable:
            return "Unreachable";
        case VerdictKind::resource_exceeded:
            return "ResourceExceeded";
    }
    return "?";
}

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::automatic:
            return "auto";
        case Algorithm::general:
            return "general";
        case Algorithm::gen_futures:
            return "gen-futures";
        case Algorithm::simple_futures:
            return "simple-futures";
        case Algorithm::flatten:
            return "flatten";
    }
    return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
    for (auto a : {Algorithm::automatic, Algorithm::general, Algorithm::gen_futures, Algorithm::simple_futures,
                   Algorithm::flatten}) {
        if (to_string(a) == name) {
            return a;
        }
    }
    return std::nullopt;
}

std::vector<StateId> heads_of(const ProcessSpec& spec) {
    std::vector<StateId> heads = spec.spawn_targets;
    if (std::find(heads.begin(), heads.end(), spec.init) == heads.end()) {
        heads.push_back(spec.init);
    }
    return heads;
}

std::set<ExtWord> base_hypothesis(const ProcessSpec& spec) {
    std::set<ExtWord> out;
    for (const auto& p : spec.spawn_targets) {
        out.insert(ExtWord{p, {}});
    }
    return out;
}

// --- level loops ---------------------------------------------------------------------

namespace {

using LevelStep = std::function<std::set<ExtWord>(const Hypothesis&)>;

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Iterates hypotheses H_0 = base_hypothesis, H_{k+1} = step(H_k). Before each step, check(H_k)
/// may stop the loop. Stops when two consecutive levels have equal prefix sets.
/// Returns the index k of the last hypothesis examined.
struct LoopResult {
    std::vector<std::set<ExtWord>> levels;
    std::optional<std::size_t> stabilized_at;
    std::size_t last = 0;
    bool stopped = false;
};

LoopResult level_loop(const ProcessSpec& spec, const LevelStep& step, std::optional<std::size_t> upto,
                      std::size_t max_levels, const std::function<bool(const Hypothesis&, std::size_t)>& check) {
    LoopResult r;
    Hypothesis h(base_hypothesis(spec));
    std::set<ExtWord> prefixes;
    for (std::size_t k = 0;; ++k) {
        r.last = k;
        if (check && check(h, k)) {
            r.stopped = true;
            return r;
        }
        if (k > max_levels) {
            throw ResourceExceeded("no stabilization within " + std::to_string(max_levels) + " levels");
        }
        auto next = step(h);
        auto next_prefixes = prefix_closure(next);
        if (k > 0 && next_prefixes == prefixes) {
            r.stabilized_at = k - 1;
            return r;
        }
        r.levels.push_back(next);
        if (upto && r.levels.size() > *upto) {
            return r;
        }
        prefixes = std::move(next_prefixes);
        h = Hypothesis(next);
    }
}

/// Union of f(head) over all heads; heads run concurrently when caps.parallel is set.
std::set<ExtWord> per_head(const ProcessSpec& spec, const SolverCaps& caps,
                           const std::function<std::set<ExtWord>(const StateId&)>& f) {
    const auto heads = heads_of(spec);
    std::set<ExtWord> out;
    if (!caps.parallel || heads.size() < 2) {
        for (const auto& head : heads) {
            auto c = f(head);
            out.insert(c.begin(), c.end());
        }
        return out;
    }
    std::vector<std::future<std::set<ExtWord>>> jobs;
    jobs.reserve(heads.size());
    for (const auto& head : heads) {
        jobs.push_back(std::async(std::launch::async, f, std::cref(head)));
    }
    for (auto& job : jobs) {
        auto c = job.get();
        out.insert(c.begin(), c.end());
    }
    return out;
}

LevelStep core_step(const ProcessSpec& spec, bool consistent, const SolverCaps& caps) {
    return [&spec, consistent, caps](const Hypothesis& h) {
        CoreOptions options = caps.core;
        options.consistent = consistent;
        return per_head(spec, caps, [&](const StateId& head) { return compute_core_K(spec, h, head, options); });
    };
}

LevelStep signature_step(const ProcessSpec& spec, const SolverCaps& caps) {
    return [&spec, caps](const Hypothesis& h) {
        return per_head(spec, caps, [&](const StateId& head) { return signature_set(spec, h, head, caps.core); });
    };
}

LevelStep outset_step(const ProcessSpec& spec, const SolverCaps& caps) {
    return [&spec, caps](const Hypothesis& h) {
        std::set<Action> outputs;
        for (const auto& a : rule_alphabet(spec)) {
            if (a.kind == LabelKind::output) {
                outputs.insert(*ext_of(spec, a));
            }
        }
        std::set<ExtWord> out;
        for (const auto& head : heads_of(spec)) {
            out.insert(ExtWord{head, {}});
            for (const auto& o : outputs) {
                if (can_produce(spec, h, head, o, caps.core)) {
                    out.insert(ExtWord{head, {o}});
                }
            }
        }
        return out;
    };
}

LevelCores to_cores(LoopResult r) {
    return LevelCores{std::move(r.levels), r.stabilized_at};
}

void validate(const ProcessSpec& spec, const SolverCaps& caps, Verdict& v) {
    if (!caps.validate || v.kind != VerdictKind::reachable) {
        return;
    }
    // Level k runs use trees of depth at most k; shallow bounds are tried first.
    ExploreBounds bounds = caps.validation_bounds;
    const std::size_t deepest = std::min(caps.validation_bounds.max_depth, std::max<std::size_t>(v.level, 1));
    for (std::size_t d = 0; d <= deepest; ++d) {
        bounds.max_depth = d;
        auto report = explore_multiset(spec, bounds);
        if (report.found) {
            v.concrete = std::move(report);
            return;
        }
    }
}

Verdict run_solver(const ProcessSpec& spec, const SolverCaps& caps, Algorithm algorithm, const LevelStep& step) {
    auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    v.algorithm = algorithm;
    CoreOptions options = caps.core;
    options.consistent = true;
    auto check = [&](const Hypothesis& h, std::size_t k) {
        auto w = target_witness(spec, h, spec.init, options);
        if (!w) {
            return false;
        }
        v.kind = VerdictKind::reachable;
        v.run = w->labels;
        v.witness = ExtWord{spec.init, ext_project(spec, w->labels)};
        v.level = k;
        return true;
    };
    auto r = level_loop(spec, step, std::nullopt, caps.max_levels, check);
    v.levels = std::move(r.levels);
    if (!r.stopped) {
        v.kind = VerdictKind::unreachable;
        v.stabilized = true;
        v.level = *r.stabilized_at;
    }
    validate(spec, caps, v);
    v.seconds = elapsed(t0);
    return v;
}

}  // namespace

LevelCores levelwise_cores(const ProcessSpec& spec, std::optional<std::size_t> upto, bool consistent,
                           const SolverCaps& caps) {
    return to_cores(level_loop(spec, core_step(spec, consistent, caps), upto, caps.max_levels, nullptr));
}

LevelCores levelwise_signatures(const ProcessSpec& spec, std::optional<std::size_t> upto, const SolverCaps& caps) {
    return to_cores(level_loop(spec, signature_step(spec, caps), upto, caps.max_levels, nullptr));
}

LevelCores levelwise_outsets(const ProcessSpec& spec, std::optional<std::size_t> upto, const SolverCaps& caps) {
    return to_cores(level_loop(spec, outset_step(spec, caps), upto, caps.max_levels, nullptr));
}

Verdict solve_general(const ProcessSpec& spec, const SolverCaps& caps) {
    return run_solver(spec, caps, Algorithm::general, core_step(spec, false, caps));
}

namespace {

/// Futures hypotheses over-approximate without the proviso, so only Unreachable
/// is final there; Reachable is re-decided by the general procedure.
Verdict futures_solver(const ProcessSpec& spec, const SolverCaps& caps, Algorithm algorithm, bool eligible,
                       const LevelStep& step) {
    const FragmentTags tags = classify(spec);
    if (!eligible) {
        throw FragmentMismatch("process is outside the " + to_string(algorithm) + " fragment");
    }
    if (!tags.proviso_ok && caps.strict_fragment) {
        throw FragmentMismatch("an external action uses the initial value");
    }
    SolverCaps inner = caps;
    if (!tags.proviso_ok) {
        inner.validate = false;
    }
    Verdict v = run_solver(spec, inner, algorithm, step);
    if (tags.proviso_ok || v.kind != VerdictKind::reachable) {
        return v;
    }
    auto t0 = std::chrono::steady_clock::now();
    Verdict g = solve_general(spec, caps);
    g.algorithm = algorithm;
    g.detail = "initial-value proviso fails; reachability confirmed by the general procedure";
    g.seconds += v.seconds + elapsed(t0) - g.seconds;
    return g;
}

}  // namespace

Verdict solve_gen_futures(const ProcessSpec& spec, const SolverCaps& caps) {
    return futures_solver(spec, caps, Algorithm::gen_futures, classify(spec).generalized_futures,
                          signature_step(spec, caps));
}

Verdict solve_simple_futures(const ProcessSpec& spec, const SolverCaps& caps) {
    return futures_solver(spec, caps, Algorithm::simple_futures, classify(spec).simple_futures,
                          outset_step(spec, caps));
}

Verdict solve_flattened(const ProcessSpec& spec, const SolverCaps& caps) {
    if (!classify(spec).no_locals) {
        throw FragmentMismatch("flattening needs a process without local variables");
    }
    auto t0 = std::chrono::steady_clock::now();
    SolverCaps inner = caps;
    inner.validate = false;
    Verdict v = solve_general(flatten(spec), inner);
    v.algorithm = Algorithm::flatten;
    v.witness.reset();
    v.run.clear();
    v.levels.clear();
    if (v.kind == VerdictKind::reachable) {
        v.detail = "witness refers to the flattened process";
    }
    validate(spec, caps, v);
    v.seconds = elapsed(t0);
    return v;
}

Algorithm select_algorithm(const ProcessSpec& spec) {
    const FragmentTags t = classify(spec);
    if (t.simple_futures && t.proviso_ok) {
        return Algorithm::simple_futures;
    }
    if (t.generalized_futures && t.proviso_ok) {
        return Algorithm::gen_futures;
    }
    if (t.no_locals && spec.kind == ProcessKind::finite) {
        return Algorithm::flatten;
    }
    return Algorithm::general;
}

Verdict solve(const ProcessSpec& spec, Algorithm algorithm, const SolverCaps& caps) {
    if (algorithm == Algorithm::automatic) {
        algorithm = select_algorithm(spec);
    }
    auto t0 = std::chrono::steady_clock::now();
    try {
        switch (algorithm) {
            case Algorithm::general:
                return solve_general(spec, caps);
            case Algorithm::gen_futures:
                return solve_gen_futures(spec, caps);
            case Algorithm::simple_futures:
                return solve_simple_futures(spec, caps);
            case Algorithm::flatten:
                return solve_flattened(spec, caps);
            case Algorithm::automatic:
                break;
        }
    } catch (const ResourceExceeded& e) {
        Verdict v;
        v.kind = VerdictKind::resource_exceeded;
        v.algorithm = algorithm;
        v.detail = e.what();
        v.seconds = elapsed(t0);
        return v;
    }
    throw Error("unknown algorithm");
}

// --- flattening -------------------------------------------------------------------------

namespace {

std::string fresh(const std::vector<std::string>& taken, std::string base) {
    std::string name = base;
    for (int i = 1; std::find(taken.begin(), taken.end(), name) != taken.end(); ++i) {
        name = base + std::to_string(i);
    }
    return name;
}

std::vector<std::string> symbols(const ProcessSpec& spec, const std::vector<SymbolId>& ids) {
    std::vector<std::string> out;
    for (auto s : ids) {
        out.push_back(spec.stack_symbols.at(s));
    }
    return out;
}

LabelText label_text(const ProcessSpec& spec, const ActionLabel& a) {
    LabelText t;
    t.kind = a.kind;
    if (a.kind == LabelKind::spawn) {
        const StateId& s = spec.spawn_targets.at(a.target);
        t.target_control = spec.controls.at(s.control);
        t.target_stack = symbols(spec, s.stack);
    } else if (a.kind != LabelKind::tau) {
        t.var = spec.variables.at(a.var).name;
        t.value = spec.values.at(a.value);
    }
    return t;
}

RuleText rule_text(const ProcessSpec& spec, const Rule& r) {
    RuleText t;
    t.from = spec.controls.at(r.from);
    if (r.pop) {
        t.pop = {spec.stack_symbols.at(*r.pop)};
    }
    t.label = label_text(spec, r.label);
    t.to = spec.controls.at(r.to);
    t.push = symbols(spec, r.push);
    return t;
}

std::vector<std::string> names_of(const ProcessSpec& spec, Scope scope) {
    std::vector<std::string> out;
    for (const auto& v : spec.variables) {
        if (v.scope == scope) {
            out.push_back(v.name);
        }
    }
    return out;
}

/// Builder preloaded with everything but the rules, states and init.
SpecBuilder builder_of(const ProcessSpec& spec) {
    SpecBuilder b;
    b.kind(spec.kind)
        .values(spec.values)
        .init_value(spec.values.at(spec.init_value))
        .target(spec.values.at(spec.target))
        .globals(names_of(spec, Scope::global))
        .locals(names_of(spec, Scope::local))
        .stack_symbols(spec.stack_symbols);
    return b;
}

LabelText var_label(LabelKind kind, std::string var, std::string value) {
    LabelText t;
    t.kind = kind;
    t.var = std::move(var);
    t.value = std::move(value);
    return t;
}

}  // namespace

ProcessSpec flatten(const ProcessSpec& spec, const FlattenOptions& options) {
    if (!classify(spec).no_locals) {
        throw FragmentMismatch("flattening needs a process without local variables");
    }
    std::vector<StateId> woken = spec.spawn_targets;
    if (options.all_states) {
        for (ControlId c = 0; c < spec.controls.size(); ++c) {
            StateId s{c, {}};
            if (std::find(woken.begin(), woken.end(), s) == woken.end()) {
                woken.push_back(s);
            }
        }
    }
    std::vector<std::string> values = spec.values;
    std::vector<std::string> wake_values;
    for (const auto& s : woken) {
        std::string base = "sp_" + spec.controls.at(s.control);
        for (auto sym : s.stack) {
            base += "_" + spec.stack_symbols.at(sym);
        }
        wake_values.push_back(fresh(values, base));
        values.push_back(wake_values.back());
    }
    std::vector<std::string> var_names;
    for (const auto& v : spec.variables) {
        var_names.push_back(v.name);
    }
    const std::string g_sp = fresh(var_names, "g_sp");
    const std::string start = fresh(spec.controls, "init_sp");
    std::vector<std::string> controls = spec.controls;
    controls.push_back(start);
    const std::string wake = fresh(controls, "wake_sp");
    controls.push_back(wake);

    SpecBuilder b = builder_of(spec);
    auto globals = names_of(spec, Scope::global);
    globals.push_back(g_sp);
    b.values(values).globals(globals).states(controls);
    b.init(start, symbols(spec, spec.init.stack));
    for (const auto& r : spec.rules) {
        RuleText t = rule_text(spec, r);
        if (r.label.kind == LabelKind::spawn) {
            auto it = std::find(woken.begin(), woken.end(), spec.spawn_targets.at(r.label.target));
            t.label = var_label(LabelKind::write, g_sp, wake_values.at(static_cast<std::size_t>(it - woken.begin())));
        }
        b.rule(std::move(t));
    }
    RuleText scaffold;
    scaffold.from = start;
    scaffold.label.kind = LabelKind::spawn;
    scaffold.label.target_control = wake;
    scaffold.to = spec.controls.at(spec.init.control);
    b.rule(scaffold);
    for (std::size_t i = 0; i < woken.size(); ++i) {
        RuleText t;
        t.from = wake;
        t.label = var_label(LabelKind::read, g_sp, wake_values[i]);
        t.to = spec.controls.at(woken[i].control);
        t.push = symbols(spec, woken[i].stack);
        b.rule(std::move(t));
    }
    return b.build();
}

CdSystem export_cd_system(const ProcessSpec& spec) {
    std::optional<std::size_t> spawn_rule;
    for (std::size_t i = 0; i < spec.rules.size(); ++i) {
        if (spec.rules[i].label.kind == LabelKind::spawn) {
            if (spawn_rule) {
                throw NotFlat("more than one spawn rule");
            }
            spawn_rule = i;
        }
    }
    if (!spawn_rule) {
        throw NotFlat("no spawn rule");
    }
    const Rule& r = spec.rules[*spawn_rule];
    if (r.from != spec.init.control) {
        throw NotFlat("the spawn rule does not leave the initial state");
    }
    for (const auto& other : spec.rules) {
        if (other.to == spec.init.control) {
            throw NotFlat("the initial state is re-entered");
        }
    }
    CdSystem cd{spec, spec};
    StateId leader{r.to, r.push};
    std::vector<SymbolId> rest = spec.init.stack;
    if (r.pop) {
        rest.erase(rest.begin());
    }
    leader.stack.insert(leader.stack.end(), rest.begin(), rest.end());
    cd.leader.init = leader;
    cd.contributor.init = spec.spawn_targets.at(r.label.target);
    return cd;
}

std::string to_text(const CdSystem& cd) {
    return "// leader\n" + to_text(cd.leader) + "// contributor\n" + to_text(cd.contributor);
}

CdSystem parse_cd(std::string_view text) {
    const std::string_view marker = "// contributor\n";
    auto pos = text.find(marker);
    if (pos == std::string_view::npos) {
        throw ParseError(1, 1, "missing '// contributor' section");
    }
    return CdSystem{parse_process(text.substr(0, pos)), parse_process(text.substr(pos + marker.size()))};
}

ProcessSpec import_cd(const CdSystem& cd) {
    const ProcessSpec& d = cd.leader;
    const ProcessSpec& c = cd.contributor;
    if (d.values != c.values || d.init_value != c.init_value || d.target != c.target ||
        d.stack_symbols != c.stack_symbols || d.kind != c.kind) {
        throw ValidationError("leader and contributor disagree on values or stack symbols");
    }
    auto globals = names_of(d, Scope::global);
    for (const auto& g : names_of(c, Scope::global)) {
        if (std::find(globals.begin(), globals.end(), g) == globals.end()) {
            globals.push_back(g);
        }
    }
    SpecBuilder b = builder_of(d);
    b.globals(globals).locals({});
    std::vector<std::string> controls;
    for (const auto& n : d.controls) {
        controls.push_back("d_" + n);
    }
    for (const auto& n : c.controls) {
        controls.push_back("c_" + n);
    }
    const std::string root = fresh(controls, "cd_init");
    controls.push_back(root);
    b.states(controls);
    b.init(root, symbols(d, d.init.stack));
    auto add_rules = [&](const ProcessSpec& s, const std::string& prefix) {
        if (!s.locals().empty()) {
            throw ValidationError("leader/contributor systems have no local variables");
        }
        for (const auto& r : s.rules) {
            RuleText t = rule_text(s, r);
            t.from = prefix + t.from;
            t.to = prefix + t.to;
            if (t.label.kind == LabelKind::spawn) {
                t.label.target_control = prefix + t.label.target_control;
            }
            b.rule(std::move(t));
        }
    };
    add_rules(d, "d_");
    add_rules(c, "c_");
    RuleText start;
    start.from = root;
    start.label.kind = LabelKind::spawn;
    start.label.target_control = "c_" + c.controls.at(c.init.control);
    start.label.target_stack = symbols(c, c.init.stack);
    start.to = "d_" + d.controls.at(d.init.control);
    b.rule(start);
    return b.build();
}

// --- reports ------------------------------------------------------------------------------

std::string report_text(const ProcessSpec& spec, const Verdict& v, bool emit_witness) {
    std::ostringstream out;
    out << to_string(v.kind) << " (" << to_string(v.algorithm);
    if (v.kind == VerdictKind::reachable) {
        out << ", level " << v.level;
    } else if (v.kind == VerdictKind::unreachable) {
        out << ", stabilized at level " << v.level;
    }
    out << ", " << v.seconds << " s)\n";
    if (!v.detail.empty()) {
        out << "note: " << v.detail << "\n";
    }
    if (v.witness) {
        out << "witness: " << format_word(spec, *v.witness) << "\n";
    }
    if (v.kind == VerdictKind::reachable) {
        out << (v.concrete ? "replayed by the multiset oracle in " + std::to_string(v.concrete->run.size()) + " steps\n"
                           : std::string("abstract witness (no concrete replay within bounds)\n"));
    }
    if (emit_witness) {
        if (!v.run.empty()) {
            out << "run: " << format_labels(spec, v.run) << "\n";
        }
        if (v.concrete) {
            out << "trace:\n" << format_trace(spec, *v.concrete);
        }
    }
    return out.str();
}

std::string report_json(const ProcessSpec& spec, const Verdict& v, bool emit_witness) {
    nlohmann::json j;
    j["verdict"] = to_string(v.kind);
    j["algorithm"] = to_string(v.algorithm);
    j["level"] = v.level;
    j["stabilized"] = v.stabilized;
    j["seconds"] = v.seconds;
    j["detail"] = v.detail;
    j["witness"] = v.witness ? nlohmann::json(format_word(spec, *v.witness)) : nlohmann::json(nullptr);
    j["abstract_witness"] = v.abstract_witness();
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& level : v.levels) {
        nlohmann::json words = nlohmann::json::array();
        for (const auto& w : level) {
            words.push_back(format_word(spec, w));
        }
        levels.push_back(words);
    }
    j["levels"] = levels;
    if (emit_witness) {
        nlohmann::json run = nlohmann::json::array();
        for (const auto& a : v.run) {
            run.push_back(format_label(spec, a));
        }
        j["run"] = run;
        nlohmann::json trace = nlohmann::json::array();
        if (v.concrete) {
            for (const auto& s : v.concrete->run) {
                trace.push_back({{"label", format_label(spec, s.label)}, {"tree", s.tree}});
            }
        }
        j["trace"] = trace;
    }
    return j.dump(2) + "\n";
}

}  // namespace dpp
