// Line-oriented and JSON readers for process documents, plus the label syntax.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dpp/model.hpp"

namespace dpp {

namespace {

bool is_name_char(char c) {
    return !std::isspace(static_cast<unsigned char>(c)) && c != ',' && c != '(' && c != ')' &&
           c != '[' && c != ']' && c != ':' && c != '{' && c != '}' && c != '"';
}

/// Cursor over one line (or one label string) with column tracking.
class Cursor {
public:
    Cursor(std::string_view text, std::size_t line, std::size_t base_column)
        : text_(text), line_(line), base_(base_column) {}

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }
    bool at_end() {
        skip_space();
        return pos_ >= text_.size();
    }
    bool peek(char c) {
        skip_space();
        return pos_ < text_.size() && text_[pos_] == c;
    }
    bool accept(char c) {
        if (peek(c)) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) {
            fail(std::string("expected '") + c + "'");
        }
    }
    bool accept_word(std::string_view w) {
        skip_space();
        if (text_.substr(pos_, w.size()) == w) {
            std::size_t end = pos_ + w.size();
            if (end >= text_.size() || !std::isalnum(static_cast<unsigned char>(text_[end]))) {
                pos_ = end;
                return true;
            }
        }
        return false;
    }
    std::string name(const char* what) {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < text_.size() && is_name_char(text_[pos_]) &&
               text_.substr(pos_, 2) != "--") {
            ++pos_;
        }
        if (start == pos_) {
            fail(std::string("expected ") + what);
        }
        return std::string(text_.substr(start, pos_ - start));
    }
    /// Optional "[a b c]" group; returns false if no '[' follows.
    bool bracket_names(std::vector<std::string>& out, std::string_view keyword = {}) {
        if (!accept('[')) {
            return false;
        }
        if (!keyword.empty() && !accept_word(keyword)) {
            fail("expected '" + std::string(keyword) + "'");
        }
        while (!accept(']')) {
            if (at_end()) {
                fail("unterminated '['");
            }
            accept(',');
            if (peek(']')) {
                continue;
            }
            out.push_back(name("stack symbol"));
        }
        return true;
    }
    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(line_, base_ + pos_ + 1, message);
    }
    std::size_t pos() const { return pos_; }
    std::string_view rest() const { return text_.substr(pos_); }

private:
    std::string_view text_;
    std::size_t line_;
    std::size_t base_;
    std::size_t pos_ = 0;
};

LabelText parse_label_text(Cursor& c) {
    LabelText lt;
    auto var_value = [&](LabelKind k) {
        lt.kind = k;
        c.expect('(');
        lt.var = c.name("variable");
        c.expect(',');
        lt.value = c.name("value");
        c.expect(')');
    };
    if (c.accept_word("tau")) {
        lt.kind = LabelKind::tau;
    } else if (c.accept_word("spawn")) {
        lt.kind = LabelKind::spawn;
        c.expect('(');
        lt.target_control = c.name("state");
        c.bracket_names(lt.target_stack);
        c.expect(')');
    } else if (c.accept_word("rbar")) {
        var_value(LabelKind::bar_read);
    } else if (c.accept_word("wbar")) {
        var_value(LabelKind::bar_write);
    } else if (c.accept_word("r")) {
        var_value(LabelKind::read);
    } else if (c.accept_word("w")) {
        var_value(LabelKind::write);
    } else if (c.accept_word("i")) {
        var_value(LabelKind::input);
    } else if (c.accept_word("o")) {
        var_value(LabelKind::output);
    } else {
        c.fail("unknown label");
    }
    return lt;
}

RuleText parse_rule_line(std::string_view line, std::size_t line_no) {
    std::size_t open = line.find("--");
    std::size_t close = open == std::string_view::npos ? open : line.find("-->", open + 2);
    if (close == std::string_view::npos) {
        throw ParseError(line_no, 1, "expected 'from --label--> to'");
    }
    RuleText r;
    Cursor left(line.substr(0, open), line_no, 0);
    r.from = left.name("source state");
    left.bracket_names(r.pop, "pop");
    if (!left.at_end()) {
        left.fail("unexpected text before label");
    }
    Cursor mid(line.substr(open + 2, close - open - 2), line_no, open + 2);
    r.label = parse_label_text(mid);
    if (!mid.at_end()) {
        mid.fail("unexpected text after label");
    }
    Cursor right(line.substr(close + 3), line_no, close + 3);
    r.to = right.name("target state");
    right.bracket_names(r.push, "push");
    if (!right.at_end()) {
        right.fail("unexpected text after rule");
    }
    return r;
}

ProcessKind parse_kind(const std::string& s, std::size_t line, std::size_t col) {
    if (s == "finite") {
        return ProcessKind::finite;
    }
    if (s == "pushdown") {
        return ProcessKind::pushdown;
    }
    throw ParseError(line, col, "kind must be 'finite' or 'pushdown'");
}

const char* const kSections[] = {"kind",  "values", "init_value", "globals", "locals",
                                 "target", "stack", "states",     "init",    "rules"};

ProcessSpec parse_lines(std::string_view text) {
    SpecBuilder b;
    std::vector<std::string> seen;
    bool in_rules = false;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (auto cmt = line.find("//"); cmt != std::string_view::npos) {
            line = line.substr(0, cmt);
        }
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        Cursor c(line, line_no, 0);
        if (c.at_end()) {
            continue;
        }
        if (line.find("-->") != std::string_view::npos) {
            if (!in_rules) {
                throw ParseError(line_no, 1, "rule outside the 'rules' section");
            }
            b.rule(parse_rule_line(line, line_no));
            continue;
        }
        std::string key = c.name("section keyword");
        if (std::find(std::begin(kSections), std::end(kSections), key) == std::end(kSections)) {
            throw ParseError(line_no, 1, "unknown section '" + key + "'");
        }
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
            throw ParseError(line_no, 1, "duplicate section '" + key + "'");
        }
        seen.push_back(key);
        c.accept(':');
        in_rules = key == "rules";
        if (key == "rules") {
            if (!c.at_end()) {
                c.fail("rules start on the next line");
            }
            continue;
        }
        std::vector<std::string> items;
        if (key == "init") {
            std::string control = c.name("initial state");
            std::vector<std::string> stack;
            c.bracket_names(stack);
            if (!c.at_end()) {
                c.fail("unexpected text after initial state");
            }
            b.init(control, stack);
            continue;
        }
        while (!c.at_end()) {
            c.accept(',');
            if (c.at_end()) {
                break;
            }
            items.push_back(c.name("name"));
        }
        auto single = [&]() {
            if (items.size() != 1) {
                throw ParseError(line_no, 1, "section '" + key + "' takes exactly one name");
            }
            return items.front();
        };
        if (key == "kind") {
            b.kind(parse_kind(single(), line_no, 1));
        } else if (key == "values") {
            b.values(items);
        } else if (key == "init_value") {
            b.init_value(single());
        } else if (key == "target") {
            b.target(single());
        } else if (key == "globals") {
            b.globals(items);
        } else if (key == "locals") {
            b.locals(items);
        } else if (key == "stack") {
            b.stack_symbols(items);
        } else if (key == "states") {
            b.states(items);
        }
    }
    return b.build();
}

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t offset) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

std::vector<std::string> json_names(const nlohmann::json& j, const char* key) {
    std::vector<std::string> out;
    if (!j.contains(key)) {
        return out;
    }
    const auto& arr = j.at(key);
    if (!arr.is_array()) {
        throw ParseError(0, 0, std::string("'") + key + "' must be an array of names");
    }
    for (const auto& v : arr) {
        if (!v.is_string()) {
            throw ParseError(0, 0, std::string("'") + key + "' must be an array of names");
        }
        out.push_back(v.get<std::string>());
    }
    return out;
}

ProcessSpec parse_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ParseError(line, col, "invalid JSON");
    }
    if (!j.is_object()) {
        throw ParseError(1, 1, "process document must be a JSON object");
    }
    for (const auto& [key, _] : j.items()) {
        if (std::find(std::begin(kSections), std::end(kSections), key) == std::end(kSections)) {
            throw ParseError(0, 0, "unknown section '" + key + "'");
        }
    }
    auto str = [&](const char* key) -> std::optional<std::string> {
        if (!j.contains(key)) {
            return std::nullopt;
        }
        if (!j.at(key).is_string()) {
            throw ParseError(0, 0, std::string("'") + key + "' must be a string");
        }
        return j.at(key).get<std::string>();
    };
    SpecBuilder b;
    if (auto k = str("kind")) {
        b.kind(parse_kind(*k, 0, 0));
    }
    b.values(json_names(j, "values"));
    if (auto v = str("init_value")) {
        b.init_value(*v);
    }
    if (auto v = str("target")) {
        b.target(*v);
    }
    b.globals(json_names(j, "globals"));
    b.locals(json_names(j, "locals"));
    b.stack_symbols(json_names(j, "stack"));
    if (j.contains("states")) {
        b.states(json_names(j, "states"));
    }
    if (j.contains("init")) {
        const auto& init = j.at("init");
        if (init.is_string()) {
            std::string s = init.get<std::string>();
            Cursor c(s, 0, 0);
            std::string control = c.name("initial state");
            std::vector<std::string> stack;
            c.bracket_names(stack);
            b.init(control, stack);
        } else if (init.is_object()) {
            b.init(init.value("control", std::string()), json_names(init, "stack"));
        } else {
            throw ParseError(0, 0, "'init' must be a string or an object");
        }
    }
    if (j.contains("rules")) {
        const auto& rules = j.at("rules");
        if (!rules.is_array()) {
            throw ParseError(0, 0, "'rules' must be an array");
        }
        std::size_t index = 0;
        for (const auto& r : rules) {
            ++index;
            if (r.is_string()) {
                b.rule(parse_rule_line(r.get<std::string>(), index));
                continue;
            }
            if (!r.is_object()) {
                throw ParseError(0, 0, "rule " + std::to_string(index) + " must be a string or object");
            }
            RuleText rt;
            rt.from = r.value("from", std::string());
            rt.to = r.value("to", std::string());
            if (r.contains("pop")) {
                if (r.at("pop").is_string()) {
                    rt.pop.push_back(r.at("pop").get<std::string>());
                } else {
                    rt.pop = json_names(r, "pop");
                }
            }
            rt.push = json_names(r, "push");
            std::string label = r.value("label", std::string());
            Cursor c(label, index, 0);
            rt.label = parse_label_text(c);
            if (!c.at_end()) {
                c.fail("unexpected text after label");
            }
            b.rule(std::move(rt));
        }
    }
    return b.build();
}

}  // namespace

ProcessSpec parse_process(std::string_view text) {
    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && text[first] == '{') {
        return parse_json(text);
    }
    return parse_lines(text);
}

ProcessSpec load_process(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_process(ss.str());
}

namespace {

std::string join(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) {
        if (!out.empty()) {
            out += ' ';
        }
        out += n;
    }
    return out;
}

std::string stack_text(const ProcessSpec& spec, const std::vector<SymbolId>& stack) {
    std::vector<std::string> names;
    for (auto s : stack) {
        names.push_back(spec.stack_symbols.at(s));
    }
    return join(names);
}

}  // namespace

std::string to_text(const ProcessSpec& spec) {
    std::ostringstream out;
    out << "kind " << (spec.kind == ProcessKind::finite ? "finite" : "pushdown") << "\n";
    out << "values " << join(spec.values) << "\n";
    out << "init_value " << spec.values.at(spec.init_value) << "\n";
    out << "target " << spec.values.at(spec.target) << "\n";
    std::vector<std::string> globals;
    std::vector<std::string> locals;
    for (const auto& v : spec.variables) {
        (v.scope == Scope::global ? globals : locals).push_back(v.name);
    }
    if (!globals.empty()) {
        out << "globals " << join(globals) << "\n";
    }
    if (!locals.empty()) {
        out << "locals " << join(locals) << "\n";
    }
    if (spec.kind == ProcessKind::pushdown) {
        out << "stack " << join(spec.stack_symbols) << "\n";
    }
    out << "states " << join(spec.controls) << "\n";
    out << "init " << format_state(spec, spec.init) << "\n";
    out << "rules\n";
    for (const auto& r : spec.rules) {
        out << spec.controls.at(r.from);
        if (r.pop) {
            out << " [pop " << spec.stack_symbols.at(*r.pop) << "]";
        }
        out << " --" << format_label(spec, r.label) << "--> " << spec.controls.at(r.to);
        if (!r.push.empty()) {
            out << " [push " << stack_text(spec, r.push) << "]";
        }
        out << "\n";
    }
    return out.str();
}

ActionLabel parse_label(const ProcessSpec& spec, std::string_view text) {
    Cursor c(text, 0, 0);
    LabelText lt = parse_label_text(c);
    if (!c.at_end()) {
        c.fail("unexpected text after label");
    }
    ActionLabel a;
    a.kind = lt.kind;
    if (lt.kind == LabelKind::tau) {
        return a;
    }
    if (lt.kind == LabelKind::spawn) {
        auto control = spec.find_control(lt.target_control);
        if (!control) {
            throw ValidationError("undeclared state '" + lt.target_control + "'");
        }
        StateId s{*control, {}};
        for (const auto& n : lt.target_stack) {
            auto sym = spec.find_symbol(n);
            if (!sym) {
                throw ValidationError("undeclared stack symbol '" + n + "'");
            }
            s.stack.push_back(*sym);
        }
        auto t = spec.find_target(s);
        if (!t) {
            throw ValidationError("'" + lt.target_control + "' is not a spawn target");
        }
        a.target = *t;
        return a;
    }
    auto x = spec.find_variable(lt.var);
    if (!x) {
        throw ValidationError("undeclared variable '" + lt.var + "'");
    }
    auto v = spec.find_value(lt.value);
    if (!v) {
        throw ValidationError("undeclared value '" + lt.value + "'");
    }
    a.var = *x;
    a.value = *v;
    return a;
}

ExtWord parse_ext_word(const ProcessSpec& spec, std::string_view text) {
    ExtWord w;
    std::size_t pos = 0;
    bool first = true;
    auto trimmed = text;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) {
        trimmed.remove_prefix(1);
    }
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) {
        trimmed.remove_suffix(1);
    }
    if (trimmed == "eps" || trimmed.empty()) {
        return w;
    }
    text = trimmed;
    while (pos < text.size()) {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        }
        if (pos >= text.size()) {
            break;
        }
        std::size_t close = text.find(')', pos);
        if (close == std::string_view::npos) {
            throw ParseError(0, pos + 1, "unterminated label");
        }
        std::string_view token = text.substr(pos, close + 1 - pos);
        pos = close + 1;
        Cursor c(token, 0, 0);
        if (c.accept_word("spawn")) {
            if (!first) {
                throw ParseError(0, pos, "spawn may only head a word");
            }
            c.expect('(');
            std::string control = c.name("state");
            std::vector<std::string> stack;
            c.bracket_names(stack);
            c.expect(')');
            auto id = spec.find_control(control);
            if (!id) {
                throw ValidationError("undeclared state '" + control + "'");
            }
            StateId head{*id, {}};
            for (const auto& n : stack) {
                auto sym = spec.find_symbol(n);
                if (!sym) {
                    throw ValidationError("undeclared stack symbol '" + n + "'");
                }
                head.stack.push_back(*sym);
            }
            w.head = head;
        } else {
            ActionLabel a = parse_label(spec, token);
            auto e = ext_of(spec, a);
            if (!e || (a.kind != LabelKind::read && a.kind != LabelKind::write &&
                       a.kind != LabelKind::input && a.kind != LabelKind::output)) {
                throw ParseError(0, pos, "not an external action: " + format_label(spec, a));
            }
            w.body.push_back(*e);
        }
        first = false;
    }
    return w;
}

}  // namespace dpp
