#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "zjsc/composer.hpp"
#include "zjsc/error.hpp"
#include "zjsc/fragment.hpp"
#include "zjsc/scenario.hpp"
#include "zjsc/script_scanner.hpp"

#include <fstream>
#include <sstream>

namespace py = pybind11;
using namespace zjsc;

namespace {

const char* kind_name(NodeKind kind)
{
    switch (kind) {
    case NodeKind::Element: return "element";
    case NodeKind::Text: return "text";
    case NodeKind::RawText: return "rawtext";
    case NodeKind::Comment: return "comment";
    case NodeKind::Doctype: return "doctype";
    }
    return "?";
}

py::dict node_to_dict(const Node& node)
{
    py::dict d;
    d["kind"] = kind_name(node.kind);
    if (node.is_element()) {
        d["name"] = node.name;
        py::list attrs;
        for (const auto& a : node.attributes)
            attrs.append(py::make_tuple(a.name, a.value));
        d["attributes"] = attrs;
        py::list children;
        for (const auto& c : node.children)
            children.append(node_to_dict(c));
        d["children"] = children;
    } else {
        d["data"] = node.data;
    }
    return d;
}

py::dict scan_to_dict(const ScanResult& r)
{
    py::dict d;
    d["methods"] = r.profile.methods;
    d["has_on_connected"] = r.profile.has_on_connected;
    d["has_on_disconnected"] = r.profile.has_on_disconnected;
    py::list issues;
    for (const auto& i : r.issues)
        issues.append(py::make_tuple(to_string(i.kind), i.offset, i.detail));
    d["issues"] = issues;
    return d;
}

FlattenOptions make_options(std::size_t max_depth, bool keep_scripts, bool keep_markers)
{
    FlattenOptions o;
    o.max_depth = max_depth;
    o.keep_scripts = keep_scripts;
    o.keep_marker_attrs = keep_markers;
    return o;
}

std::vector<std::string> to_strings(const std::vector<Locator>& locators)
{
    std::vector<std::string> out;
    for (const auto& l : locators)
        out.push_back(l.str());
    return out;
}

/// Resolver whose loader may be a Python callable returning str.
class PyResolver {
public:
    explicit PyResolver(std::optional<py::function> loader)
        : m_resolver(loader ? wrap(std::move(*loader)) : default_loader())
    {
    }

    std::string resolve(const std::string& locator)
    {
        py::gil_scoped_release release;
        return m_resolver.resolve(Locator(locator)).text;
    }

    Resolver& get() { return m_resolver; }

private:
    static Loader wrap(py::function fn)
    {
        auto shared = std::make_shared<py::function>(std::move(fn));
        return [shared](const Locator& l) -> LoadResult {
            py::gil_scoped_acquire acquire;
            py::object value = (*shared)(l.str());
            if (value.is_none())
                throw FetchError(FetchErrorKind::NotFound, l.str(), "loader returned None");
            return {value.cast<std::string>(), SourceOrigin::File};
        };
    }

    Resolver m_resolver;
};

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Native core of the zjsc toolchain";

    auto base = py::register_exception<Error>(m, "ZjscError");
    py::register_exception<EncodingError>(m, "EncodingError", base);
    py::register_exception<LocatorError>(m, "LocatorError", base);
    py::register_exception<FetchError>(m, "FetchError", base);
    py::register_exception<CycleError>(m, "CycleError", base);
    py::register_exception<DepthExceeded>(m, "DepthExceeded", base);
    py::register_exception<ScenarioError>(m, "ScenarioError", base);

    m.def(
        "parse_fragment",
        [](const std::string& text) {
            FragmentDocument doc = parse_fragment(text);
            py::list nodes;
            for (const auto& n : doc.nodes)
                nodes.append(node_to_dict(n));
            py::list diags;
            for (const auto& d : doc.diagnostics)
                diags.append(py::make_tuple(d.severity == Severity::Error ? "error" : "warning", d.code, d.offset));
            py::dict out;
            out["nodes"] = nodes;
            out["diagnostics"] = diags;
            return out;
        },
        py::arg("text"), "Parse a fragment into nested dicts.");

    m.def(
        "normalize", [](const std::string& text) { return serialize_fragment(parse_fragment(text)); },
        py::arg("text"), "Parse and re-serialize in normal form.");

    m.def(
        "component_specs",
        [](const std::string& text) {
            py::list out;
            for (const auto& spec : extract_component_specs(parse_fragment(text)).specs) {
                py::dict d;
                d["remote_src"] = spec.remote_src;
                py::list attrs;
                for (const auto& a : spec.attributes)
                    attrs.append(py::make_tuple(a.name, a.value));
                d["attributes"] = attrs;
                d["display"] = spec.display;
                d["path"] = spec.element_ref;
                out.append(d);
            }
            return out;
        },
        py::arg("text"));

    m.def("scan_script", [](const std::string& body) { return scan_to_dict(scan_script(body)); }, py::arg("body"));
    m.def(
        "method_table", [](const std::string& text) { return scan_to_dict(method_table(parse_fragment(text))); },
        py::arg("text"));

    m.def(
        "canonicalize",
        [](const std::string& base, const std::string& ref, std::optional<std::filesystem::path> sandbox_root) {
            return canonicalize(Locator(base), ref, sandbox_root).str();
        },
        py::arg("base"), py::arg("ref"), py::arg("sandbox_root") = py::none());

    py::class_<PyResolver>(m, "Resolver")
        .def(py::init<std::optional<py::function>>(), py::arg("loader") = py::none())
        .def("resolve", &PyResolver::resolve, py::arg("locator"))
        .def("invalidate", [](PyResolver& r, const std::string& l) { return r.get().invalidate(Locator(l)); })
        .def("is_cached", [](PyResolver& r, const std::string& l) { return r.get().is_cached(Locator(l)); })
        .def("stats", [](PyResolver& r) {
            ResolverStats s = r.get().stats();
            py::dict d;
            d["requests"] = s.requests;
            d["loads"] = s.loads;
            d["cache_hits"] = s.cache_hits;
            d["coalesced"] = s.coalesced;
            return d;
        });

    m.def(
        "flatten",
        [](const std::string& entry, std::size_t max_depth, bool keep_scripts, bool keep_markers) {
            py::gil_scoped_release release;
            Resolver resolver;
            Locator root = Locator::from_path(std::filesystem::absolute(entry));
            return serialize_fragment(flatten(root, resolver, make_options(max_depth, keep_scripts, keep_markers)));
        },
        py::arg("entry"), py::arg("max_depth") = 32, py::arg("keep_scripts") = true, py::arg("keep_markers") = true);

    m.def(
        "build_graph",
        [](const std::string& entry) {
            Resolver resolver;
            Locator root = Locator::from_path(std::filesystem::absolute(entry));
            DependencyGraph g = build_graph(root, resolver);
            py::dict d;
            std::vector<std::string> nodes;
            for (const auto& n : g.nodes)
                nodes.push_back(n.str());
            std::vector<std::pair<std::string, std::string>> edges;
            for (const auto& [a, b] : g.edges)
                edges.emplace_back(a.str(), b.str());
            std::vector<std::vector<std::string>> cycles;
            for (const auto& c : detect_cycles(g))
                cycles.push_back(to_strings(c));
            std::map<std::string, std::string> annotations;
            for (const auto& [k, v] : g.annotations)
                annotations.emplace(k.str(), v);
            d["nodes"] = nodes;
            d["edges"] = edges;
            d["cycles"] = cycles;
            d["annotations"] = annotations;
            return d;
        },
        py::arg("entry"));

    m.def(
        "format_graph",
        [](const std::string& entry, const std::string& format) {
            Resolver resolver;
            Locator root = Locator::from_path(std::filesystem::absolute(entry));
            DependencyGraph g = build_graph(root, resolver);
            auto dir = root.path().parent_path();
            if (format == "dot")
                return format_graph_dot(g, dir);
            if (format == "edges")
                return format_graph_edges(g, dir);
            throw py::value_error("format must be 'dot' or 'edges'");
        },
        py::arg("entry"), py::arg("format") = "edges");

    m.def(
        "detect_cycles",
        [](const std::vector<std::pair<std::string, std::string>>& edges, const std::vector<std::string>& roots) {
            DependencyGraph g;
            for (const auto& r : roots) {
                g.roots.emplace_back(r);
                g.add_node(Locator(r));
            }
            for (const auto& [a, b] : edges)
                g.add_edge(Locator(a), Locator(b));
            std::vector<std::vector<std::string>> out;
            for (const auto& c : detect_cycles(g))
                out.push_back(to_strings(c));
            return out;
        },
        py::arg("edges"), py::arg("roots"));

    m.def(
        "run_scenario",
        [](const std::filesystem::path& path) {
            Scenario scenario = load_scenario(path);
            Resolver resolver;
            ScenarioResult result = run_scenario(scenario, resolver);
            py::list trace;
            for (const auto& ev : result.trace) {
                py::dict e;
                e["seq"] = ev.seq;
                e["kind"] = to_string(ev.kind);
                e["instance"] = ev.label;
                e["method"] = ev.method;
                e["args"] = ev.args;
                e["detail"] = ev.detail;
                trace.append(e);
            }
            py::dict d;
            d["name"] = scenario.name;
            d["passed"] = result.passed;
            d["trace"] = trace;
            d["diff"] = result.passed ? std::string() : trace_diff(result.trace, scenario.expect, scenario.strict);
            return d;
        },
        py::arg("path"));
}
