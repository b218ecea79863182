#pragma once

// Headless model of the component lifecycle and send() dispatch. Scripts are
// never run: the simulator records, in a totally ordered trace, what the
// browser runtime would do.

#include "zjsc/fragment.hpp"
#include "zjsc/locator.hpp"
#include "zjsc/resolver.hpp"
#include "zjsc/script_scanner.hpp"
#include "zjsc/selector.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace zjsc {

using NodeId = std::uint64_t;
using InstanceId = std::uint64_t;

inline constexpr InstanceId no_instance = 0;

class SimNode {
public:
    NodeId id = 0;
    NodeKind kind = NodeKind::Element;
    std::string name;
    std::vector<Attribute> attributes;
    std::string data;
    std::vector<std::unique_ptr<SimNode>> children;
    std::optional<InstanceId> instance; // set on component nodes

    bool is_element() const noexcept { return kind == NodeKind::Element && m_parent != nullptr; }
    const std::string* attribute(std::string_view attr) const;
    const SimNode* parent() const noexcept { return m_parent; }
    SimNode* parent() noexcept { return m_parent; }

private:
    friend class SimDocument;
    SimNode* m_parent = nullptr;
};

enum class LifecycleState { Created, Loaded, Connected, Disconnected };

const char* to_string(LifecycleState state);

struct ComponentInstance {
    InstanceId id = no_instance;
    std::string label;
    ComponentSpec spec;
    Locator locator;                  // canonical remote-src, once resolved
    ScriptProfile profile;
    LifecycleState state = LifecycleState::Created;
    std::vector<Attribute> attributes; // live attributes of the element
    NodeId node = 0;
};

struct SelectorTarget {
    std::string selector;
};
struct InstanceTarget {
    InstanceId instance;
};
struct ElementTarget {
    NodeId node;
};

/// The three receiver forms accepted by send().
using DispatchTarget = std::variant<SelectorTarget, InstanceTarget, ElementTarget>;

enum class TraceKind { FragmentFetched, ScriptsEvaluated, Connected, Disconnected, Dispatch, DispatchError };

const char* to_string(TraceKind kind);
std::optional<TraceKind> trace_kind_from_string(std::string_view name);

struct TraceEvent {
    std::uint64_t seq = 0;
    TraceKind kind = TraceKind::Dispatch;
    InstanceId instance = no_instance;
    std::string label; // label of `instance`, empty when none
    std::string method;
    std::vector<std::string> args;
    std::string detail;
};

/// One line summary, e.g. `Connected hello hook:onConnected`.
std::string describe(const TraceEvent& event);

class SimDocument {
public:
    /// `base` is the locator of the host page; remote-src values of
    /// top-level components resolve against it.
    SimDocument(Resolver& resolver, Locator base);
    ~SimDocument();

    SimDocument(const SimDocument&) = delete;
    SimDocument& operator=(const SimDocument&) = delete;

    NodeId root() const noexcept { return m_root->id; }
    const SimNode* node(NodeId id) const;
    const Locator& base() const noexcept { return m_base; }

    /// Host-page construction.
    NodeId append_element(NodeId parent, std::string tag, std::vector<Attribute> attributes = {});
    NodeId append_text(NodeId parent, std::string text);

    /// Creates a component element under `parent`, fetches its fragment and
    /// connects it; nested components connect first, depth-first in document
    /// order. On failure the element stays attached in state Created, a
    /// DispatchError is traced and the error is rethrown.
    const ComponentInstance& insert_component(NodeId parent, const ComponentSpec& spec, std::string label = {});

    /// Detaches a live component. Nested components disconnect before
    /// their ancestors. Throws UnknownInstance.
    void remove_component(InstanceId id);

    /// Updates a live attribute. Changing remote-src reloads the fragment and
    /// starts a new connection episode.
    void set_attribute(InstanceId id, const std::string& name, std::string value);

    /// Throws TargetError.
    const ComponentInstance& resolve_target(const DispatchTarget& target) const;

    /// Records a Dispatch, or a DispatchError when the target cannot be
    /// resolved or lacks the method. Never mutates the tree.
    TraceEvent send(const DispatchTarget& target, const std::string& method, std::vector<std::string> args = {});

    const ComponentInstance* instance(InstanceId id) const;
    const ComponentInstance* find_label(std::string_view label) const;
    std::vector<const ComponentInstance*> live_instances() const;
    const std::vector<TraceEvent>& trace() const noexcept { return m_trace; }

    /// First node in document order matching `selector`, or nullptr.
    const SimNode* query_selector(std::string_view selector) const;
    /// All nodes below the root in document order.
    std::vector<const SimNode*> nodes_in_order() const;

private:
    SimNode& attach(SimNode& parent, std::unique_ptr<SimNode> child);
    std::unique_ptr<SimNode> make_node(NodeKind kind);
    void import_nodes(SimNode& parent, const std::vector<Node>& nodes);
    void forget_subtree(SimNode& node);

    ComponentInstance& create_instance(SimNode& element, ComponentSpec spec, std::string label);
    void load(ComponentInstance& instance, std::vector<Locator>& chain);
    void connect_nested(SimNode& element, ComponentInstance& owner, std::vector<Locator>& chain);
    void disconnect_subtree(SimNode& node, bool include_self);
    const Locator& base_for(const SimNode& node) const;

    TraceEvent& record(TraceKind kind, const ComponentInstance* instance, std::string detail = {});

    Resolver& m_resolver;
    Locator m_base;
    std::unique_ptr<SimNode> m_root;
    NodeId m_next_node = 1;
    InstanceId m_next_instance = 1;
    std::unordered_map<NodeId, SimNode*> m_nodes;
    std::map<InstanceId, ComponentInstance> m_instances; // live only
    std::vector<TraceEvent> m_trace;
};

} // namespace zjsc
