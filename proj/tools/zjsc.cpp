// zjsc: validate, flatten, graph, simulate and serve <zjs-component> pages.

#include "zjsc/cli.hpp"
#include "zjsc/devserver.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <iostream>

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int)
{
    g_interrupted = true;
}

int serve(const std::filesystem::path& root, int port, bool watch)
{
    std::error_code ec;
    if (!std::filesystem::is_directory(root, ec)) {
        std::cerr << "error: " << root.string() << " is not a directory\n";
        return zjsc::exit_environment;
    }
    zjsc::ServeOptions options;
    options.root = root;
    options.port = port;
    options.watch = watch;
    zjsc::DevServer server(options);
    if (!server.bind()) {
        std::cerr << "error: cannot listen on " << options.host << ':' << port << '\n';
        return zjsc::exit_environment;
    }
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    server.start();
    std::cout << "serving " << server.root().string() << " at http://" << options.host << ':' << server.port() << '/'
              << (watch ? " (watching)" : "") << std::endl;
    while (!g_interrupted)
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
    return zjsc::exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Tooling for <zjs-component> fragment pages"};
    app.require_subcommand(1);

    bool strict = false;
    std::vector<std::filesystem::path> paths;
    auto* validate = app.add_subcommand("validate", "Check fragments for parse and script problems");
    validate->add_flag("--strict", strict, "Treat warnings as errors");
    validate->add_option("paths", paths, "Fragment files")->required();

    std::string entry;
    std::filesystem::path output;
    zjsc::FlattenOptions flatten_options;
    bool no_scripts = false;
    bool no_markers = false;
    auto* flatten = app.add_subcommand("flatten", "Inline every include into one page");
    flatten->add_option("entry", entry, "Entry page (path or URL)")->required();
    flatten->add_option("-o,--output", output, "Output file")->required();
    flatten->add_option("--max-depth", flatten_options.max_depth, "Maximum include depth")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    flatten->add_flag("--no-scripts", no_scripts, "Drop <script> elements");
    flatten->add_flag("--no-markers", no_markers, "Omit data-zjs-from markers");

    std::string format = "edges";
    auto* graph = app.add_subcommand("graph", "Print the include dependency graph");
    graph->add_option("entry", entry, "Entry page (path or URL)")->required();
    graph->add_option("--format", format, "Output format")
        ->capture_default_str()
        ->check(CLI::IsMember({"edges", "dot"}));

    std::filesystem::path scenario;
    auto* simulate = app.add_subcommand("simulate", "Run a lifecycle scenario against the simulator");
    simulate->add_option("scenario", scenario, "Scenario JSON file")->required();

    std::filesystem::path root;
    int port = zjsc::default_port;
    bool watch = false;
    auto* serve_cmd = app.add_subcommand("serve", "Serve a site directory for development");
    serve_cmd->add_option("root", root, "Site root")->required();
    serve_cmd->add_option("--port", port, "TCP port")->capture_default_str()->check(CLI::Range(1, 65535));
    serve_cmd->add_flag("--watch", watch, "Invalidate cached fragments when files change");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : zjsc::exit_environment;
    }

    try {
        if (validate->parsed())
            return zjsc::cmd_validate(paths, strict, std::cout, std::cerr);
        if (flatten->parsed()) {
            flatten_options.keep_scripts = !no_scripts;
            flatten_options.keep_marker_attrs = !no_markers;
            return zjsc::cmd_flatten(entry, output, flatten_options, std::cout, std::cerr);
        }
        if (graph->parsed())
            return zjsc::cmd_graph(entry, format == "dot" ? zjsc::GraphFormat::Dot : zjsc::GraphFormat::Edges,
                                   std::cout, std::cerr);
        if (simulate->parsed())
            return zjsc::cmd_simulate(scenario, std::cout, std::cerr);
        if (serve_cmd->parsed())
            return serve(root, port, watch);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return zjsc::exit_environment;
    }
    return zjsc::exit_environment;
}
