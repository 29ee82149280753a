#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dpp/corpus.hpp"
#include "dpp/errors.hpp"
#include "dpp/solver.hpp"
#include "dpp/words.hpp"

namespace py = pybind11;
using namespace dpp;

namespace {

std::vector<std::string> format_words(const ProcessSpec& spec, const std::set<ExtWord>& ws) {
    std::vector<std::string> out;
    for (const ExtWord& w : ws) {
        out.push_back(format_word(spec, w));
    }
    return out;
}

py::dict fragment_dict(const ProcessSpec& spec) {
    const FragmentTags t = classify(spec);
    py::dict d;
    d["no_locals"] = t.no_locals;
    d["generalized_futures"] = t.generalized_futures;
    d["simple_futures"] = t.simple_futures;
    d["proviso_ok"] = t.proviso_ok;
    return d;
}

std::string check_json(const ProcessSpec& spec, const std::string& algorithm, bool validate, bool strict,
                       std::size_t max_levels, bool emit_witness) {
    const auto a = parse_algorithm(algorithm);
    if (!a) {
        throw py::value_error("unknown algorithm '" + algorithm + "'");
    }
    SolverCaps caps;
    caps.validate = validate;
    caps.strict_fragment = strict;
    caps.max_levels = max_levels;
    Verdict v;
    {
        py::gil_scoped_release release;
        v = solve(spec, *a, caps);
    }
    return report_json(spec, v, emit_witness);
}

std::vector<std::vector<std::string>> levels(const ProcessSpec& spec, std::size_t level, const std::string& kind,
                                             bool consistent) {
    LevelCores lc;
    {
        py::gil_scoped_release release;
        if (kind == "core") {
            lc = levelwise_cores(spec, level, consistent);
        } else if (kind == "signatures") {
            lc = levelwise_signatures(spec, level);
        } else if (kind == "outsets") {
            lc = levelwise_outsets(spec, level);
        } else {
            throw py::value_error("kind must be core, signatures or outsets");
        }
    }
    std::vector<std::vector<std::string>> out;
    for (const auto& l : lc.levels) {
        out.push_back(format_words(spec, prefix_closure(l)));
    }
    return out;
}

py::dict oracle(const ProcessSpec& spec, const std::string& semantics, std::size_t depth, std::size_t children,
                std::size_t steps, std::size_t stack, std::size_t states) {
    const ExploreBounds b{depth, children, steps, stack, states};
    ReachReport r;
    {
        py::gil_scoped_release release;
        if (semantics == "multiset") {
            r = explore_multiset(spec, b);
        } else if (semantics == "set") {
            r = explore_set(spec, b);
        } else {
            throw py::value_error("semantics must be multiset or set");
        }
    }
    py::dict d;
    d["found"] = r.found;
    d["truncated"] = r.truncated;
    d["explored"] = r.explored;
    py::list run;
    for (const TraceStep& s : r.run) {
        run.append(py::make_tuple(format_label(spec, s.label), s.tree));
    }
    d["run"] = run;
    return d;
}

}  // namespace

PYBIND11_MODULE(_dpp, m) {
    m.doc() = "Reachability for dynamic parametric processes";

    auto base = py::register_exception<Error>(m, "DppError", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<FragmentMismatch>(m, "FragmentMismatch", base.ptr());
    py::register_exception<ResourceExceeded>(m, "ResourceExceeded", base.ptr());
    py::register_exception<NotFlat>(m, "NotFlat", base.ptr());

    py::class_<ProcessSpec>(m, "Process")
        .def_property_readonly("kind",
                               [](const ProcessSpec& s) { return s.kind == ProcessKind::finite ? "finite" : "pushdown"; })
        .def_property_readonly("controls", [](const ProcessSpec& s) { return s.controls; })
        .def_property_readonly("values", [](const ProcessSpec& s) { return s.values; })
        .def_property_readonly("num_rules", [](const ProcessSpec& s) { return s.rules.size(); })
        .def("to_text", [](const ProcessSpec& s) { return to_text(s); })
        .def("fragment", &fragment_dict)
        .def("__repr__", [](const ProcessSpec& s) {
            return "<Process " + std::to_string(s.controls.size()) + " controls, " + std::to_string(s.rules.size()) +
                   " rules>";
        });

    m.def("parse", [](const std::string& text) { return parse_process(text); }, py::arg("text"));
    m.def("load", &load_process, py::arg("path"));
    m.def("check_json", &check_json, py::arg("process"), py::arg("algorithm") = "auto", py::arg("validate") = true,
          py::arg("strict") = false, py::arg("max_levels") = 64, py::arg("emit_witness") = false);
    m.def("levels", &levels, py::arg("process"), py::arg("level"), py::arg("kind") = "core",
          py::arg("consistent") = false);
    m.def("oracle", &oracle, py::arg("process"), py::arg("semantics") = "multiset", py::arg("depth") = 3,
          py::arg("children") = 3, py::arg("steps") = 30, py::arg("stack") = 8, py::arg("states") = 200'000);
    m.def("flatten", [](const ProcessSpec& s, bool all_states) { return flatten(s, {all_states}); },
          py::arg("process"), py::arg("all_states") = false);
    m.def("encode_sat", [](const std::string& dimacs) { return encode_sat(parse_dimacs(dimacs)); }, py::arg("dimacs"));
}
