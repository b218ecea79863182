#include "zjsc/cli.hpp"

#include "zjsc/error.hpp"
#include "zjsc/fragment.hpp"
#include "zjsc/scenario.hpp"
#include "zjsc/script_scanner.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace zjsc {

namespace {

std::filesystem::path display_dir(const Locator& entry)
{
    return entry.is_url() ? std::filesystem::path() : entry.path().parent_path();
}

std::string relative_chain(const std::vector<std::string>& chain, const std::filesystem::path& dir)
{
    std::vector<std::string> shown;
    for (const auto& item : chain)
        shown.push_back(display_locator(Locator(item), dir));
    return join_chain(shown);
}

bool read_file(const std::filesystem::path& path, std::string& text)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return false;
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
    return !in.bad();
}

struct Finding {
    std::size_t offset;
    bool error;
    std::string code;
    std::string message;
};

} // namespace

Locator entry_locator(const std::string& entry)
{
    if (entry.starts_with("http://") || entry.starts_with("https://"))
        return canonicalize(Locator(), entry);
    return Locator::from_path(std::filesystem::absolute(entry));
}

int cmd_validate(const std::vector<std::filesystem::path>& paths, bool strict, std::ostream& out, std::ostream& err)
{
    std::size_t errors = 0;
    std::size_t warnings = 0;
    for (const auto& path : paths) {
        std::error_code ec;
        if (!std::filesystem::is_regular_file(path, ec)) {
            err << path.string() << ": cannot read file\n";
            return exit_environment;
        }
        std::string text;
        if (!read_file(path, text)) {
            err << path.string() << ": cannot read file\n";
            return exit_environment;
        }

        std::vector<Finding> findings;
        std::vector<std::string> methods;
        try {
            FragmentDocument doc = parse_fragment(text, path.string());
            for (const auto& d : doc.diagnostics)
                findings.push_back({d.offset, d.severity == Severity::Error, d.code, d.message});
            for (const auto& d : extract_component_specs(doc).warnings)
                findings.push_back({d.offset, false, d.code, d.message});
            ScanResult scan = method_table(doc);
            for (const auto& issue : scan.issues)
                findings.push_back({issue.offset, issue.is_error(), to_string(issue.kind), issue.detail});
            methods = scan.profile.methods;
        } catch (const EncodingError& e) {
            findings.push_back({e.offset(), true, "EncodingError", e.what()});
        }
        std::stable_sort(findings.begin(), findings.end(),
                         [](const Finding& a, const Finding& b) { return a.offset < b.offset; });

        std::size_t file_errors = 0;
        for (const auto& f : findings) {
            auto [line, column] = line_column(text, f.offset);
            out << path.string() << ':' << line << ':' << column << ": " << (f.error ? "error" : "warning") << ' '
                << f.code << ": " << f.message << '\n';
            f.error ? ++file_errors : ++warnings;
        }
        errors += file_errors;
        out << path.string() << ": " << (file_errors ? "invalid" : "ok");
        out << " methods: [";
        for (std::size_t i = 0; i < methods.size(); ++i)
            out << (i ? ", " : "") << methods[i];
        out << "]\n";
    }
    out << paths.size() << " file(s), " << errors << " error(s), " << warnings << " warning(s)\n";
    if (errors || (strict && warnings))
        return exit_domain;
    return exit_ok;
}

int cmd_flatten(const std::string& entry, const std::filesystem::path& output, const FlattenOptions& options,
                std::ostream& out, std::ostream& err)
{
    Locator root;
    try {
        root = entry_locator(entry);
    } catch (const LocatorError& e) {
        err << "error: " << e.what() << '\n';
        return exit_domain;
    }
    const auto dir = display_dir(root);

    std::string html;
    try {
        Resolver resolver;
        html = serialize_fragment(flatten(root, resolver, options));
    } catch (const CycleError& e) {
        err << "error: include cycle: " << relative_chain(e.chain(), dir) << '\n';
        return exit_domain;
    } catch (const DepthExceeded& e) {
        err << "error: include depth exceeds " << e.max_depth() << ": " << relative_chain(e.chain(), dir) << '\n';
        return exit_domain;
    } catch (const FetchError& e) {
        err << "error: " << e.what() << '\n';
        if (!e.chain().empty())
            err << "  via: " << relative_chain(e.chain(), dir) << '\n';
        return exit_domain;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_domain;
    }

    std::ofstream file(output, std::ios::binary | std::ios::trunc);
    if (!file || !file.write(html.data(), static_cast<std::streamsize>(html.size()))) {
        err << "error: cannot write " << output.string() << '\n';
        return exit_environment;
    }
    out << "wrote " << output.string() << " (" << html.size() << " bytes)\n";
    return exit_ok;
}

int cmd_graph(const std::string& entry, GraphFormat format, std::ostream& out, std::ostream& err)
{
    Locator root;
    try {
        root = entry_locator(entry);
    } catch (const LocatorError& e) {
        err << "error: " << e.what() << '\n';
        return exit_domain;
    }
    Resolver resolver;
    DependencyGraph graph = build_graph(root, resolver);
    if (auto it = graph.annotations.find(root); it != graph.annotations.end()) {
        err << "error: " << it->second << '\n';
        return exit_domain;
    }
    const auto dir = display_dir(root);
    out << (format == GraphFormat::Dot ? format_graph_dot(graph, dir) : format_graph_edges(graph, dir));
    return exit_ok;
}

int cmd_simulate(const std::filesystem::path& scenario_path, std::ostream& out, std::ostream& err)
{
    Scenario scenario;
    try {
        scenario = load_scenario(scenario_path);
    } catch (const FetchError& e) {
        err << "error: " << e.what() << '\n';
        return exit_environment;
    } catch (const ScenarioError& e) {
        err << "error: " << scenario_path.string() << ": " << e.what() << '\n';
        return exit_domain;
    }

    ScenarioResult result;
    try {
        Resolver resolver;
        result = run_scenario(scenario, resolver);
    } catch (const ScenarioError& e) {
        err << "error: " << scenario.name << ": " << e.what() << '\n';
        return exit_domain;
    }

    if (result.passed) {
        out << "PASS " << scenario.name << " (" << result.trace.size() << " events)\n";
        return exit_ok;
    }
    out << "FAIL " << scenario.name << (scenario.strict ? " (strict)" : "") << '\n';
    out << trace_diff(result.trace, scenario.expect, scenario.strict);
    for (const auto& note : result.notes)
        out << "note: " << note << '\n';
    return exit_domain;
}

} // namespace zjsc
