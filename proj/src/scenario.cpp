#include "zjsc/scenario.hpp"

#include "zjsc/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace zjsc {

using json = nlohmann::ordered_json;

namespace {

constexpr std::size_t no_step = static_cast<std::size_t>(-1);

std::string join(const std::vector<std::string>& items, std::string_view sep)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i)
            out += sep;
        out += items[i];
    }
    return out;
}

class StepReader {
public:
    StepReader(const json& object, std::size_t step, std::string context)
        : m_object(object), m_step(step), m_context(std::move(context))
    {
        if (!object.is_object())
            fail("expected an object");
    }

    [[noreturn]] void fail(const std::string& why) const
    {
        std::string where = m_step == no_step ? m_context : m_context + " " + std::to_string(m_step);
        throw ScenarioError(m_step, where + ": " + why);
    }

    void allow_only(std::initializer_list<std::string_view> keys) const
    {
        for (const auto& [key, value] : m_object.items()) {
            if (std::find(keys.begin(), keys.end(), key) == keys.end())
                fail("unknown field '" + key + "'");
        }
    }

    bool has(const char* key) const { return m_object.contains(key); }

    std::string string(const char* key) const
    {
        if (!has(key))
            fail(std::string("missing field '") + key + "'");
        return string_value(m_object.at(key), key);
    }

    std::optional<std::string> optional_string(const char* key) const
    {
        if (!has(key))
            return std::nullopt;
        return string_value(m_object.at(key), key);
    }

    std::vector<std::string> strings(const char* key) const
    {
        std::vector<std::string> out;
        if (!has(key))
            return out;
        const json& v = m_object.at(key);
        if (!v.is_array())
            fail(std::string("'") + key + "' must be an array of strings");
        for (const auto& item : v)
            out.push_back(string_value(item, key));
        return out;
    }

    const json& at(const char* key) const { return m_object.at(key); }

private:
    std::string string_value(const json& v, const char* key) const
    {
        if (!v.is_string())
            fail(std::string("'") + key + "' must be a string");
        return v.get<std::string>();
    }

    const json& m_object;
    std::size_t m_step;
    std::string m_context;
};

ScenarioStep parse_step(const json& object, std::size_t index)
{
    StepReader r(object, index, "step");
    std::string op = r.string("op");
    if (op == "insert") {
        r.allow_only({"op", "as", "remote-src", "attributes", "display", "parent", "comment"});
        InsertStep step;
        step.label = r.optional_string("as").value_or("");
        step.remote_src = r.string("remote-src");
        if (step.remote_src.empty())
            r.fail("'remote-src' must not be empty");
        step.display = r.optional_string("display");
        step.parent = r.optional_string("parent");
        if (r.has("attributes")) {
            const json& attrs = r.at("attributes");
            if (!attrs.is_object())
                r.fail("'attributes' must be an object");
            for (const auto& [name, value] : attrs.items()) {
                if (!value.is_string())
                    r.fail("attribute '" + name + "' must be a string");
                if (name == remote_src_attr || name == display_attr)
                    r.fail("'" + name + "' is not a forwarded attribute");
                step.attributes.push_back({name, value.get<std::string>()});
            }
        }
        return step;
    }
    if (op == "remove") {
        r.allow_only({"op", "instance", "comment"});
        return RemoveStep{r.string("instance")};
    }
    if (op == "send") {
        r.allow_only({"op", "target", "method", "args", "comment"});
        SendStep step;
        if (!r.has("target"))
            r.fail("missing field 'target'");
        StepReader t(r.at("target"), index, "step");
        t.allow_only({"selector", "instance", "element"});
        int forms = t.has("selector") + t.has("instance") + t.has("element");
        if (forms != 1)
            r.fail("'target' needs exactly one of selector, instance, element");
        if (t.has("selector"))
            step.target = {TargetSpec::Form::Selector, t.string("selector")};
        else if (t.has("instance"))
            step.target = {TargetSpec::Form::Instance, t.string("instance")};
        else
            step.target = {TargetSpec::Form::Element, t.string("element")};
        step.method = r.string("method");
        step.args = r.strings("args");
        return step;
    }
    if (op == "set-attribute") {
        r.allow_only({"op", "instance", "name", "value", "comment"});
        return SetAttributeStep{r.string("instance"), r.string("name"), r.string("value")};
    }
    r.fail("unknown op '" + op + "'");
}

EventPattern parse_pattern(const json& object, std::size_t index)
{
    StepReader r(object, no_step, "expect " + std::to_string(index));
    r.allow_only({"kind", "instance", "method", "args", "detail", "comment"});
    EventPattern p;
    std::string kind = r.string("kind");
    auto parsed = trace_kind_from_string(kind);
    if (!parsed)
        r.fail("unknown event kind '" + kind + "'");
    p.kind = *parsed;
    p.instance = r.optional_string("instance");
    p.method = r.optional_string("method");
    if (r.has("args"))
        p.args = r.strings("args");
    p.detail = r.optional_string("detail");
    return p;
}

} // namespace

bool EventPattern::matches(const TraceEvent& event) const
{
    return event.kind == kind && (!instance || *instance == event.label) && (!method || *method == event.method)
        && (!args || *args == event.args) && (!detail || *detail == event.detail);
}

std::string EventPattern::describe() const
{
    std::string out = to_string(kind);
    if (instance)
        out += " " + *instance;
    if (method)
        out += " " + *method + "(" + (args ? join(*args, ", ") : "*") + ")";
    if (detail)
        out += " " + *detail;
    return out;
}

Scenario parse_scenario(std::string_view json_text, const std::filesystem::path& scenario_dir)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(no_step, std::string("scenario is not valid JSON: ") + e.what());
    }
    StepReader r(doc, no_step, "scenario");
    r.allow_only({"name", "description", "fixtures_root", "strict", "steps", "expect"});

    // A scenario without expectations would pass vacuously.
    for (const char* key : {"name", "steps", "expect"}) {
        if (!r.has(key))
            r.fail(std::string("missing required key '") + key + "'");
    }

    Scenario scenario;
    scenario.name = r.string("name");
    std::filesystem::path root = r.optional_string("fixtures_root").value_or(".");
    scenario.fixtures_root = std::filesystem::absolute(root.is_absolute() ? root : scenario_dir / root).lexically_normal();
    if (r.has("strict")) {
        if (!r.at("strict").is_boolean())
            r.fail("'strict' must be a boolean");
        scenario.strict = r.at("strict").get<bool>();
    }
    if (!r.at("steps").is_array())
        r.fail("'steps' must be an array");
    std::size_t i = 0;
    for (const auto& step : r.at("steps"))
        scenario.steps.push_back(parse_step(step, i++));
    if (!r.at("expect").is_array())
        r.fail("'expect' must be an array");
    i = 0;
    for (const auto& pattern : r.at("expect"))
        scenario.expect.push_back(parse_pattern(pattern, i++));
    return scenario;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FetchError(FetchErrorKind::NotFound, path.string(), "cannot open scenario");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str(), std::filesystem::absolute(path).parent_path());
}

bool trace_matches(const std::vector<TraceEvent>& trace, const std::vector<EventPattern>& expect, bool strict)
{
    if (strict) {
        if (trace.size() != expect.size())
            return false;
        for (std::size_t i = 0; i < trace.size(); ++i) {
            if (!expect[i].matches(trace[i]))
                return false;
        }
        return true;
    }
    // Greedy earliest matching decides subsequence membership exactly.
    std::size_t next = 0;
    for (const auto& event : trace) {
        if (next < expect.size() && expect[next].matches(event))
            ++next;
    }
    return next == expect.size();
}

std::string trace_diff(const std::vector<TraceEvent>& trace, const std::vector<EventPattern>& expect, bool strict)
{
    const std::size_t n = expect.size();
    const std::size_t m = trace.size();
    // Longest common subsequence under pattern matching.
    std::vector<std::vector<std::size_t>> lcs(n + 1, std::vector<std::size_t>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = m; j-- > 0;) {
            lcs[i][j] = expect[i].matches(trace[j]) ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
        }
    }
    std::string out = "--- expected\n+++ actual\n@@ -1," + std::to_string(n) + " +1," + std::to_string(m) + " @@\n";
    std::size_t i = 0, j = 0;
    while (i < n || j < m) {
        if (i < n && j < m && expect[i].matches(trace[j]) && lcs[i][j] == lcs[i + 1][j + 1] + 1) {
            out += " " + describe(trace[j]) + "\n";
            ++i, ++j;
        } else if (j < m && (i == n || lcs[i][j + 1] >= lcs[i + 1][j])) {
            // Unlisted events are allowed unless the scenario is strict.
            out += (strict ? "+" : " ") + describe(trace[j]) + "\n";
            ++j;
        } else {
            out += "-" + expect[i].describe() + "\n";
            ++i;
        }
    }
    return out;
}

ScenarioResult run_scenario(const Scenario& scenario, Resolver& resolver)
{
    SimDocument doc(resolver, Locator::from_path(scenario.fixtures_root / "index.html"));
    ScenarioResult result;

    auto label_of = [&](const std::string& label, std::size_t step) -> InstanceId {
        if (const ComponentInstance* inst = doc.find_label(label))
            return inst->id;
        for (const auto& ev : doc.trace()) {
            if (ev.label == label)
                return ev.instance;
        }
        throw ScenarioError(step, "step " + std::to_string(step) + ": unknown instance '" + label + "'");
    };
    auto live = [&](const std::string& label, std::size_t step) -> InstanceId {
        InstanceId id = label_of(label, step);
        if (!doc.instance(id))
            throw ScenarioError(step, "step " + std::to_string(step) + ": instance '" + label + "' is not live");
        return id;
    };

    std::set<std::string> labels;
    for (std::size_t index = 0; index < scenario.steps.size(); ++index) {
        const ScenarioStep& step = scenario.steps[index];
        try {
            if (const auto* insert = std::get_if<InsertStep>(&step)) {
                if (!insert->label.empty() && !labels.insert(insert->label).second)
                    throw ScenarioError(index, "step " + std::to_string(index) + ": label '" + insert->label
                                                   + "' already used");
                NodeId parent = doc.root();
                if (insert->parent) {
                    const SimNode* host = nullptr;
                    try {
                        host = doc.query_selector(*insert->parent);
                    } catch (const SelectorError& e) {
                        throw ScenarioError(index, "step " + std::to_string(index) + ": " + e.what());
                    }
                    if (!host)
                        throw ScenarioError(index, "step " + std::to_string(index) + ": no node matches parent '"
                                                       + *insert->parent + "'");
                    parent = host->id;
                }
                ComponentSpec spec;
                spec.remote_src = insert->remote_src;
                spec.attributes = insert->attributes;
                spec.display = insert->display;
                doc.insert_component(parent, spec, insert->label);
            } else if (const auto* remove = std::get_if<RemoveStep>(&step)) {
                doc.remove_component(live(remove->instance, index));
            } else if (const auto* send = std::get_if<SendStep>(&step)) {
                DispatchTarget target;
                switch (send->target.form) {
                case TargetSpec::Form::Selector:
                    target = SelectorTarget{send->target.value};
                    break;
                case TargetSpec::Form::Instance:
                    target = InstanceTarget{label_of(send->target.value, index)};
                    break;
                case TargetSpec::Form::Element: {
                    const SimNode* n = nullptr;
                    try {
                        n = doc.query_selector(send->target.value);
                    } catch (const SelectorError& e) {
                        throw ScenarioError(index, "step " + std::to_string(index) + ": " + e.what());
                    }
                    target = ElementTarget{n ? n->id : 0};
                    break;
                }
                }
                doc.send(target, send->method, send->args);
            } else if (const auto* set = std::get_if<SetAttributeStep>(&step)) {
                doc.set_attribute(live(set->instance, index), set->name, set->value);
            }
        } catch (const ScenarioError&) {
            throw;
        } catch (const Error& e) {
            // Load failures are already in the trace as DispatchError events.
            result.notes.push_back("step " + std::to_string(index) + ": " + e.what());
        }
    }

    result.trace = doc.trace();
    result.passed = trace_matches(result.trace, scenario.expect, scenario.strict);
    return result;
}

} // namespace zjsc
