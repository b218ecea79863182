// Acceptance suite: one PASS/FAIL line per criterion, full counts.
// Exit status is the number of failing criteria.

#include "zjsc/cli.hpp"

#include "support/properties.hpp"

#include <CLI11.hpp>

#include <array>
#include <cstdio>
#include <iostream>

namespace fs = std::filesystem;
using namespace zjsc;
using namespace zjsc::test;
using Clock = std::chrono::steady_clock;

namespace {

// The five scenarios mirroring the documented examples.
const std::array<const char*, 5> conformance_scenarios = {
    "01-static-include.json",  "02-display-attribute.json", "03-passing-parameters.json",
    "04-send-update-name.json", "05-nearest-ancestor.json",
};

constexpr double conformance_budget_s = 5.0;

/// Runs `zjsc simulate` on each scenario; stdout is captured for the report.
PropertyResult check_conformance(const fs::path& fixtures, const std::optional<fs::path>& cli)
{
    PropertyResult r;
    auto start = Clock::now();
    for (const char* name : conformance_scenarios) {
        fs::path scenario = fixtures / "scenarios" / name;
        int status = 0;
        std::string output;
        if (cli) {
            std::string command = "'" + cli->string() + "' simulate '" + scenario.string() + "' 2>&1";
            FILE* pipe = popen(command.c_str(), "r");
            if (!pipe) {
                r.fail(std::string(name) + ": cannot start " + cli->string());
                continue;
            }
            std::array<char, 4096> buf;
            while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe))
                output.append(buf.data(), n);
            int raw = pclose(pipe);
            status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
        } else {
            std::ostringstream out;
            status = cmd_simulate(scenario, out, out);
            output = out.str();
        }
        ++r.cases;
        if (status != 0 || output.rfind("PASS ", 0) != 0)
            r.fail(std::string(name) + " exited " + std::to_string(status) + ":\n" + output);
    }
    double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    if (r.ok && elapsed >= conformance_budget_s)
        r.fail("5 scenarios took " + std::to_string(elapsed) + " s, budget " + std::to_string(conformance_budget_s)
               + " s");
    if (r.ok) {
        std::ostringstream d;
        d << "5/5 scenarios PASS via " << (cli ? "zjsc simulate" : "in-process simulate") << " in " << std::fixed
          << std::setprecision(2) << elapsed << " s (< " << conformance_budget_s << " s)";
        r.detail = d.str();
    }
    return r;
}

PropertyResult both(PropertyResult a, const PropertyResult& b)
{
    if (!b.ok)
        a.fail(b.detail);
    a.cases += b.cases;
    if (a.ok)
        a.detail += "; " + b.detail;
    return a;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"zjsc acceptance suite"};
    fs::path fixtures;
    std::optional<fs::path> cli;
    std::uint64_t seed = 20260115;
    app.add_option("--fixtures", fixtures, "Fixture directory")->required()->check(CLI::ExistingDirectory);
    app.add_option("--zjsc", cli, "zjsc executable for the conformance scenarios")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Base seed for the generated cases")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    struct Criterion {
        const char* name;
        std::function<PropertyResult()> run;
    };
    const std::vector<Criterion> criteria = {
        {"conformance-scenarios", [&] { return check_conformance(fixtures, cli); }},
        {"single-flight", [] { return check_single_flight(50, 100, std::chrono::milliseconds(100)); }},
        {"parser-round-trip",
         [&] { return both(check_parser_idempotence(1000, seed), check_parser_robustness(10000, seed + 1)); }},
        {"cycle-oracle", [&] { return check_cycle_oracle(500, 12, 0.25, seed + 2); }},
        {"dispatch-oracle", [&] { return check_dispatch_oracle(1000, seed + 3); }},
        {"flatten-corpus", [&] { return check_flatten_corpus(fixtures); }},
        {"lifecycle-ordering", [&] { return check_lifecycle_ordering(1000, seed + 4); }},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        auto start = Clock::now();
        PropertyResult r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r.fail(std::string("uncaught exception: ") + e.what());
        }
        double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
        failures += r.ok ? 0 : 1;
        std::cout << (r.ok ? "PASS " : "FAIL ") << c.name << " (" << std::fixed << std::setprecision(2) << elapsed
                  << " s): " << r.detail << std::endl;
    }
    std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failures;
}
