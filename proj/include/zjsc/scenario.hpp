#pragma once

// Conformance scenarios: a JSON op list run against a fresh SimDocument plus
// the ordered trace events it must produce. The same files drive the browser
// runtime harness.

#include "zjsc/resolver.hpp"
#include "zjsc/simulator.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace zjsc {

struct InsertStep {
    std::string label;                  // "as"; generated when absent
    std::string remote_src;
    std::vector<Attribute> attributes;  // forwarded, in file order
    std::optional<std::string> display;
    std::optional<std::string> parent;  // selector of the host node; document root when absent
};

struct RemoveStep {
    std::string instance;
};

struct TargetSpec {
    enum class Form { Selector, Instance, Element } form = Form::Selector;
    // Form::Selector: the selector; Form::Instance: a label;
    // Form::Element: a selector naming any node (first match).
    std::string value;
};

struct SendStep {
    TargetSpec target;
    std::string method;
    std::vector<std::string> args;
};

struct SetAttributeStep {
    std::string instance;
    std::string name;
    std::string value;
};

using ScenarioStep = std::variant<InsertStep, RemoveStep, SendStep, SetAttributeStep>;

struct EventPattern {
    TraceKind kind = TraceKind::Connected;
    std::optional<std::string> instance; // label
    std::optional<std::string> method;
    std::optional<std::vector<std::string>> args;
    std::optional<std::string> detail;

    bool matches(const TraceEvent& event) const;
    std::string describe() const;
};

struct Scenario {
    std::string name;
    std::filesystem::path fixtures_root; // absolute
    bool strict = false;
    std::vector<ScenarioStep> steps;
    std::vector<EventPattern> expect;
};

/// Parses scenario JSON. A relative fixtures_root is taken relative to
/// `scenario_dir`. Throws ScenarioError.
Scenario parse_scenario(std::string_view json_text, const std::filesystem::path& scenario_dir);
Scenario load_scenario(const std::filesystem::path& path);

/// Expected events must occur in order; in strict mode the trace must
/// consist of exactly those events.
bool trace_matches(const std::vector<TraceEvent>& trace, const std::vector<EventPattern>& expect, bool strict);

/// Unified diff of expected patterns against the actual trace.
std::string trace_diff(const std::vector<TraceEvent>& trace, const std::vector<EventPattern>& expect, bool strict);

struct ScenarioResult {
    bool passed = false;
    std::vector<TraceEvent> trace;
    std::vector<std::string> notes; // errors raised by individual steps, already traced
};

/// Runs every step against a fresh document whose base is
/// `fixtures_root/index.html`. Throws ScenarioError for steps that reference
/// unknown labels or nodes.
ScenarioResult run_scenario(const Scenario& scenario, Resolver& resolver);

} // namespace zjsc
