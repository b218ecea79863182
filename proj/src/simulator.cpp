#include "zjsc/simulator.hpp"

#include "zjsc/error.hpp"

#include <algorithm>

namespace zjsc {

namespace {

constexpr std::size_t max_nesting = 32;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void set_attr(std::vector<Attribute>& attrs, const std::string& name, std::string value)
{
    for (auto& a : attrs) {
        if (a.name == name) {
            a.value = std::move(value);
            return;
        }
    }
    attrs.push_back({name, std::move(value)});
}

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

} // namespace

const char* to_string(LifecycleState state)
{
    switch (state) {
    case LifecycleState::Created: return "Created";
    case LifecycleState::Loaded: return "Loaded";
    case LifecycleState::Connected: return "Connected";
    case LifecycleState::Disconnected: return "Disconnected";
    }
    return "?";
}

const char* to_string(TraceKind kind)
{
    switch (kind) {
    case TraceKind::FragmentFetched: return "FragmentFetched";
    case TraceKind::ScriptsEvaluated: return "ScriptsEvaluated";
    case TraceKind::Connected: return "Connected";
    case TraceKind::Disconnected: return "Disconnected";
    case TraceKind::Dispatch: return "Dispatch";
    case TraceKind::DispatchError: return "DispatchError";
    }
    return "?";
}

std::optional<TraceKind> trace_kind_from_string(std::string_view name)
{
    for (auto kind : {TraceKind::FragmentFetched, TraceKind::ScriptsEvaluated, TraceKind::Connected,
                      TraceKind::Disconnected, TraceKind::Dispatch, TraceKind::DispatchError}) {
        if (name == to_string(kind))
            return kind;
    }
    return std::nullopt;
}

std::string describe(const TraceEvent& event)
{
    std::string out = to_string(event.kind);
    if (!event.label.empty())
        out += " " + event.label;
    if (!event.method.empty())
        out += " " + event.method + "(" + join(event.args, ", ") + ")";
    if (!event.detail.empty())
        out += " " + event.detail;
    return out;
}

const std::string* SimNode::attribute(std::string_view attr) const
{
    for (const auto& a : attributes) {
        if (a.name == attr)
            return &a.value;
    }
    return nullptr;
}

SimDocument::SimDocument(Resolver& resolver, Locator base)
    : m_resolver(resolver), m_base(std::move(base))
{
    // The root stands for the document itself; with no parent it never
    // matches a selector.
    m_root = make_node(NodeKind::Element);
    m_root->name = "#document";
    m_nodes[m_root->id] = m_root.get();
}

SimDocument::~SimDocument() = default;

const SimNode* SimDocument::node(NodeId id) const
{
    auto it = m_nodes.find(id);
    return it == m_nodes.end() ? nullptr : it->second;
}

std::unique_ptr<SimNode> SimDocument::make_node(NodeKind kind)
{
    auto n = std::make_unique<SimNode>();
    n->id = m_next_node++;
    n->kind = kind;
    return n;
}

SimNode& SimDocument::attach(SimNode& parent, std::unique_ptr<SimNode> child)
{
    child->m_parent = &parent;
    m_nodes[child->id] = child.get();
    parent.children.push_back(std::move(child));
    return *parent.children.back();
}

NodeId SimDocument::append_element(NodeId parent, std::string tag, std::vector<Attribute> attributes)
{
    auto it = m_nodes.find(parent);
    if (it == m_nodes.end())
        throw Error("unknown node " + std::to_string(parent));
    auto n = make_node(NodeKind::Element);
    n->name = std::move(tag);
    n->attributes = std::move(attributes);
    return attach(*it->second, std::move(n)).id;
}

NodeId SimDocument::append_text(NodeId parent, std::string text)
{
    auto it = m_nodes.find(parent);
    if (it == m_nodes.end())
        throw Error("unknown node " + std::to_string(parent));
    auto n = make_node(NodeKind::Text);
    n->data = std::move(text);
    return attach(*it->second, std::move(n)).id;
}

void SimDocument::import_nodes(SimNode& parent, const std::vector<Node>& nodes)
{
    for (const auto& src : nodes) {
        if (src.kind == NodeKind::Doctype)
            continue;
        auto n = make_node(src.kind);
        n->name = src.name;
        n->attributes = src.attributes;
        n->data = src.data;
        SimNode& added = attach(parent, std::move(n));
        import_nodes(added, src.children);
    }
}

void SimDocument::forget_subtree(SimNode& node)
{
    for (auto& child : node.children)
        forget_subtree(*child);
    if (node.instance)
        m_instances.erase(*node.instance);
    m_nodes.erase(node.id);
}

TraceEvent& SimDocument::record(TraceKind kind, const ComponentInstance* instance, std::string detail)
{
    TraceEvent event;
    event.seq = m_trace.size() + 1;
    event.kind = kind;
    if (instance) {
        event.instance = instance->id;
        event.label = instance->label;
    }
    event.detail = std::move(detail);
    m_trace.push_back(std::move(event));
    return m_trace.back();
}

ComponentInstance& SimDocument::create_instance(SimNode& element, ComponentSpec spec, std::string label)
{
    ComponentInstance inst;
    inst.id = m_next_instance++;
    inst.label = label.empty() ? "c" + std::to_string(inst.id) : std::move(label);
    inst.spec = std::move(spec);
    inst.attributes = element.attributes;
    inst.node = element.id;
    element.instance = inst.id;
    return m_instances.emplace(inst.id, std::move(inst)).first->second;
}

const Locator& SimDocument::base_for(const SimNode& node) const
{
    for (const SimNode* a = node.parent(); a; a = a->parent()) {
        if (a->instance) {
            auto it = m_instances.find(*a->instance);
            if (it != m_instances.end() && !it->second.locator.empty())
                return it->second.locator;
        }
    }
    return m_base;
}

namespace {

std::vector<Locator> ancestor_chain(const SimNode& node, const std::map<InstanceId, ComponentInstance>& instances)
{
    std::vector<Locator> chain;
    for (const SimNode* a = node.parent(); a; a = a->parent()) {
        if (!a->instance)
            continue;
        auto it = instances.find(*a->instance);
        if (it != instances.end() && !it->second.locator.empty())
            chain.push_back(it->second.locator);
    }
    std::reverse(chain.begin(), chain.end());
    return chain;
}

std::filesystem::path display_root(const Locator& base)
{
    return base.is_url() ? std::filesystem::path{} : base.path().parent_path();
}

} // namespace

void SimDocument::load(ComponentInstance& instance, std::vector<Locator>& chain)
{
    SimNode& element = *m_nodes.at(instance.node);

    Locator target;
    try {
        target = canonicalize(base_for(element), instance.spec.remote_src);
    } catch (const LocatorError& e) {
        record(TraceKind::DispatchError, &instance, std::string("LocatorError: ") + e.what());
        throw;
    }
    if (std::find(chain.begin(), chain.end(), target) != chain.end()) {
        std::vector<std::string> cycle;
        for (auto it = std::find(chain.begin(), chain.end(), target); it != chain.end(); ++it)
            cycle.push_back(display_locator(*it, display_root(m_base)));
        cycle.push_back(display_locator(target, display_root(m_base)));
        CycleError error(cycle);
        record(TraceKind::DispatchError, &instance, std::string("CycleError: ") + join_chain(cycle));
        throw error;
    }
    if (chain.size() >= max_nesting) {
        record(TraceKind::DispatchError, &instance, "DepthExceeded: " + std::to_string(max_nesting));
        throw DepthExceeded(max_nesting, {});
    }

    FragmentSource source;
    try {
        source = m_resolver.resolve(target);
    } catch (const FetchError& e) {
        record(TraceKind::DispatchError, &instance, std::string("FetchError: ") + e.what());
        throw;
    }
    instance.locator = target;
    record(TraceKind::FragmentFetched, &instance, display_locator(target, display_root(m_base)));

    FragmentDocument fragment;
    try {
        fragment = parse_fragment(source.text, target.str());
    } catch (const EncodingError& e) {
        record(TraceKind::DispatchError, &instance, std::string("EncodingError: ") + e.what());
        throw;
    }
    instance.profile = method_table(fragment).profile;
    instance.state = LifecycleState::Loaded;
    import_nodes(element, fragment.nodes);
    record(TraceKind::ScriptsEvaluated, &instance, "methods:" + join(instance.profile.methods, ","));

    chain.push_back(target);
    connect_nested(element, instance, chain);
    chain.pop_back();

    instance.state = LifecycleState::Connected;
    record(TraceKind::Connected, &instance, instance.profile.has_on_connected ? "hook:onConnected" : "");
}

void SimDocument::connect_nested(SimNode& element, ComponentInstance& owner, std::vector<Locator>& chain)
{
    std::vector<SimNode*> pending;
    auto collect = [&](auto& self, SimNode& n) -> void {
        for (auto& child : n.children) {
            if (child->kind != NodeKind::Element)
                continue;
            const std::string* src = child->attribute(remote_src_attr);
            if (child->name == component_tag && !child->instance && src && !src->empty()) {
                pending.push_back(child.get());
                continue;
            }
            self(self, *child);
        }
    };
    collect(collect, element);

    std::size_t index = 0;
    for (SimNode* nested : pending) {
        ComponentSpec spec;
        for (const auto& a : nested->attributes) {
            if (a.name == remote_src_attr)
                spec.remote_src = a.value;
            else if (a.name == display_attr)
                spec.display = a.value;
            else
                spec.attributes.push_back(a);
        }
        ComponentInstance& child = create_instance(*nested, std::move(spec), owner.label + "/" + std::to_string(index++));
        try {
            load(child, chain);
        } catch (const Error&) {
            // Traced as a DispatchError; siblings and the owner still connect.
        }
    }
}

const ComponentInstance& SimDocument::insert_component(NodeId parent, const ComponentSpec& spec, std::string label)
{
    auto it = m_nodes.find(parent);
    if (it == m_nodes.end())
        throw Error("unknown node " + std::to_string(parent));
    if (spec.remote_src.empty())
        throw Error("component spec without remote-src");

    auto element = make_node(NodeKind::Element);
    element->name = std::string(component_tag);
    element->attributes.push_back({std::string(remote_src_attr), spec.remote_src});
    if (spec.display)
        element->attributes.push_back({std::string(display_attr), *spec.display});
    for (const auto& a : spec.attributes) {
        if (!element->attribute(a.name))
            element->attributes.push_back(a);
    }
    if (spec.display)
        set_attr(element->attributes, "style", merge_display_style(element->attribute("style"), *spec.display));
    SimNode& node = attach(*it->second, std::move(element));
    ComponentInstance& inst = create_instance(node, spec, std::move(label));
    auto chain = ancestor_chain(node, m_instances);
    load(inst, chain);
    return inst;
}

void SimDocument::disconnect_subtree(SimNode& node, bool include_self)
{
    for (auto it = node.children.rbegin(); it != node.children.rend(); ++it)
        disconnect_subtree(**it, true);
    if (!include_self || !node.instance)
        return;
    auto found = m_instances.find(*node.instance);
    if (found != m_instances.end()) {
        ComponentInstance& inst = found->second;
        if (inst.state == LifecycleState::Connected) {
            record(TraceKind::Disconnected, &inst, inst.profile.has_on_disconnected ? "hook:onDisconnected" : "");
            inst.state = LifecycleState::Disconnected;
        }
        m_instances.erase(found);
    }
    node.instance.reset();
}

void SimDocument::remove_component(InstanceId id)
{
    auto found = m_instances.find(id);
    if (found == m_instances.end())
        throw UnknownInstance("no live component instance " + std::to_string(id));
    SimNode* element = m_nodes.at(found->second.node);

    disconnect_subtree(*element, true);
    forget_subtree(*element);
    SimNode* parent = element->parent();
    std::erase_if(parent->children, [&](const std::unique_ptr<SimNode>& c) { return c.get() == element; });
}

void SimDocument::set_attribute(InstanceId id, const std::string& name, std::string value)
{
    auto found = m_instances.find(id);
    if (found == m_instances.end())
        throw UnknownInstance("no live component instance " + std::to_string(id));
    ComponentInstance& inst = found->second;
    SimNode& element = *m_nodes.at(inst.node);

    set_attr(element.attributes, name, value);
    set_attr(inst.attributes, name, value);

    if (name == remote_src_attr) {
        if (value.empty() || (value == inst.spec.remote_src && inst.state == LifecycleState::Connected))
            return;
        inst.spec.remote_src = value;
        disconnect_subtree(element, false);
        for (auto& child : element.children)
            forget_subtree(*child);
        element.children.clear();
        inst.profile = {};
        inst.locator = {};
        inst.state = LifecycleState::Created;
        auto chain = ancestor_chain(element, m_instances);
        load(inst, chain);
    } else if (name == display_attr) {
        set_attr(element.attributes, "style", merge_display_style(element.attribute("style"), value));
        inst.spec.display = std::move(value);
    } else {
        set_attr(inst.spec.attributes, name, std::move(value));
    }
}

const ComponentInstance& SimDocument::resolve_target(const DispatchTarget& target) const
{
    return std::visit(
        overloaded{
            [&](const SelectorTarget& t) -> const ComponentInstance& {
                const SimNode* hit = nullptr;
                try {
                    hit = query_selector(t.selector);
                } catch (const SelectorError& e) {
                    throw TargetError(TargetErrorKind::TargetNotFound, e.what());
                }
                if (!hit)
                    throw TargetError(TargetErrorKind::TargetNotFound, "no element matches '" + t.selector + "'");
                if (!hit->instance)
                    throw TargetError(TargetErrorKind::NotAComponent,
                                      "'" + t.selector + "' matched <" + hit->name + ">, not a component");
                return m_instances.at(*hit->instance);
            },
            [&](const InstanceTarget& t) -> const ComponentInstance& {
                auto it = m_instances.find(t.instance);
                if (it == m_instances.end())
                    throw TargetError(TargetErrorKind::TargetNotFound,
                                      "no live component instance " + std::to_string(t.instance));
                return it->second;
            },
            [&](const ElementTarget& t) -> const ComponentInstance& {
                const SimNode* n = node(t.node);
                if (!n || n == m_root.get())
                    throw TargetError(TargetErrorKind::TargetNotFound, "no attached node " + std::to_string(t.node));
                for (; n; n = n->parent()) {
                    if (n->instance)
                        return m_instances.at(*n->instance);
                }
                throw TargetError(TargetErrorKind::NoAncestorComponent,
                                  "node " + std::to_string(t.node) + " has no enclosing component");
            },
        },
        target);
}

TraceEvent SimDocument::send(const DispatchTarget& target, const std::string& method, std::vector<std::string> args)
{
    const ComponentInstance* inst = nullptr;
    try {
        inst = &resolve_target(target);
    } catch (const TargetError& e) {
        TraceEvent& ev = record(TraceKind::DispatchError, nullptr, std::string(to_string(e.kind())) + ": " + e.what());
        ev.method = method;
        ev.args = std::move(args);
        return ev;
    }
    TraceEvent* ev;
    if (inst->state != LifecycleState::Connected) {
        ev = &record(TraceKind::DispatchError, inst,
                     std::string("NotConnected: ") + inst->label + " is " + to_string(inst->state));
    } else if (!inst->profile.has_method(method)) {
        ev = &record(TraceKind::DispatchError, inst, "MethodNotFound: " + method + " on " + inst->label);
    } else {
        ev = &record(TraceKind::Dispatch, inst);
    }
    ev->method = method;
    ev->args = std::move(args);
    return *ev;
}

const ComponentInstance* SimDocument::instance(InstanceId id) const
{
    auto it = m_instances.find(id);
    return it == m_instances.end() ? nullptr : &it->second;
}

const ComponentInstance* SimDocument::find_label(std::string_view label) const
{
    for (const auto& [id, inst] : m_instances) {
        if (inst.label == label)
            return &inst;
    }
    return nullptr;
}

std::vector<const ComponentInstance*> SimDocument::live_instances() const
{
    std::vector<const ComponentInstance*> out;
    for (const auto& [id, inst] : m_instances)
        out.push_back(&inst);
    return out;
}

std::vector<const SimNode*> SimDocument::nodes_in_order() const
{
    std::vector<const SimNode*> out;
    auto walk = [&](auto& self, const SimNode& n) -> void {
        for (const auto& c : n.children) {
            out.push_back(c.get());
            self(self, *c);
        }
    };
    walk(walk, *m_root);
    return out;
}

const SimNode* SimDocument::query_selector(std::string_view selector) const
{
    Selector parsed = parse_selector(selector);
    for (const SimNode* n : nodes_in_order()) {
        if (matches(parsed, *n))
            return n;
    }
    return nullptr;
}

} // namespace zjsc
