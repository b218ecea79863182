#include "zjsc/composer.hpp"

#include "zjsc/error.hpp"

#include <algorithm>
#include <deque>
#include <future>
#include <stdexcept>

namespace zjsc {

namespace {

std::vector<std::string> to_strings(const std::vector<Locator>& chain)
{
    std::vector<std::string> out;
    out.reserve(chain.size());
    for (const auto& l : chain)
        out.push_back(l.str());
    return out;
}

void strip_scripts(std::vector<Node>& nodes)
{
    std::erase_if(nodes, [](const Node& n) { return n.is_element("script"); });
    for (auto& n : nodes)
        strip_scripts(n.children);
}

bool is_pending_include(const Node& node)
{
    if (!node.is_element(component_tag) || node.has_attribute(marker_attr))
        return false;
    const std::string* src = node.attribute(remote_src_attr);
    return src && !src->empty();
}

class Composer {
public:
    Composer(Resolver& resolver, const FlattenOptions& options, Locator document)
        : m_resolver(resolver), m_options(options), m_document(std::move(document))
    {
        if (options.max_depth < 1)
            throw std::invalid_argument("max_depth must be at least 1");
    }

    void expand(std::vector<Node>& nodes, const Locator& base, std::vector<Locator>& chain)
    {
        prefetch(nodes, base, chain);
        for (auto& node : nodes) {
            if (!node.is_element())
                continue;
            if (node.name == component_tag) {
                if (const std::string* from = node.attribute(marker_attr)) {
                    // Already expanded; its content resolves relative to the
                    // fragment it came from.
                    Locator origin = canonicalize(m_document, *from, m_options.sandbox_root);
                    chain.push_back(origin);
                    expand(node.children, origin, chain);
                    chain.pop_back();
                    continue;
                }
                if (is_pending_include(node)) {
                    include(node, base, chain);
                    continue;
                }
            }
            expand(node.children, base, chain);
        }
    }

private:
    void include(Node& wrapper, const Locator& base, std::vector<Locator>& chain)
    {
        Locator target = canonicalize(base, *wrapper.attribute(remote_src_attr), m_options.sandbox_root);
        if (std::find(chain.begin(), chain.end(), target) != chain.end()) {
            auto cycle = chain;
            cycle.erase(cycle.begin(), std::find(cycle.begin(), cycle.end(), target));
            cycle.push_back(target);
            throw CycleError(to_strings(cycle));
        }
        if (chain.size() > m_options.max_depth) {
            auto deep = chain;
            deep.push_back(target);
            throw DepthExceeded(m_options.max_depth, to_strings(deep));
        }

        // Authored children of the wrapper stay in front of the included content.
        expand(wrapper.children, base, chain);

        chain.push_back(target);
        FragmentSource source;
        try {
            source = m_resolver.resolve(target);
        } catch (const FetchError& e) {
            throw e.with_chain(to_strings(chain));
        }
        FragmentDocument fragment = parse_fragment(source.text, target.str());
        expand(fragment.nodes, target, chain);
        chain.pop_back();

        for (auto& n : fragment.nodes)
            wrapper.children.push_back(std::move(n));
        if (const std::string* display = wrapper.attribute(display_attr)) {
            wrapper.set_attribute("style", merge_display_style(wrapper.attribute("style"), *display));
            if (!m_options.keep_tags)
                wrapper.remove_attribute(display_attr);
        }
        if (m_options.keep_marker_attrs)
            wrapper.set_attribute(marker_attr, relative_reference(target, m_document));
    }

    // Starts the loads of every include in this fragment concurrently so
    // sibling fetches overlap; the walk that follows hits the cache.
    void prefetch(const std::vector<Node>& nodes, const Locator& base, const std::vector<Locator>& chain)
    {
        std::set<Locator> targets;
        collect_targets(nodes, base, chain, targets);
        if (targets.size() < 2)
            return;
        std::vector<std::future<void>> loads;
        for (const auto& target : targets) {
            loads.push_back(std::async(std::launch::async, [this, target] {
                try {
                    m_resolver.resolve(target);
                } catch (const Error&) {
                    // surfaced again, with its chain, by the sequential walk
                }
            }));
        }
        for (auto& f : loads)
            f.get();
    }

    void collect_targets(const std::vector<Node>& nodes, const Locator& base, const std::vector<Locator>& chain,
                         std::set<Locator>& out) const
    {
        for (const auto& node : nodes) {
            if (!node.is_element() || node.has_attribute(marker_attr))
                continue;
            if (is_pending_include(node)) {
                try {
                    Locator target = canonicalize(base, *node.attribute(remote_src_attr), m_options.sandbox_root);
                    if (std::find(chain.begin(), chain.end(), target) == chain.end()
                        && !m_resolver.is_cached(target))
                        out.insert(std::move(target));
                } catch (const LocatorError&) {
                }
                continue;
            }
            collect_targets(node.children, base, chain, out);
        }
    }

    Resolver& m_resolver;
    const FlattenOptions& m_options;
    Locator m_document; // markers are relative to this page
};

void collect_includes(const std::vector<Node>& nodes, std::vector<std::string>& out)
{
    for (const auto& node : nodes) {
        if (!node.is_element() || (node.is_element(component_tag) && node.has_attribute(marker_attr)))
            continue;
        if (is_pending_include(node))
            out.push_back(*node.attribute(remote_src_attr));
        collect_includes(node.children, out);
    }
}

} // namespace

void flatten_in_place(FragmentDocument& doc, Resolver& resolver, const FlattenOptions& options)
{
    Locator entry(doc.source);
    Composer composer(resolver, options, entry);
    std::vector<Locator> chain{entry};
    composer.expand(doc.nodes, entry, chain);
    if (!options.keep_scripts)
        strip_scripts(doc.nodes);
}

FragmentDocument flatten(const Locator& entry, Resolver& resolver, const FlattenOptions& options)
{
    FragmentSource source;
    try {
        source = resolver.resolve(entry);
    } catch (const FetchError& e) {
        throw e.with_chain({entry.str()});
    }
    FragmentDocument doc = parse_fragment(source.text, entry.str());
    flatten_in_place(doc, resolver, options);
    return doc;
}

// ---------------------------------------------------------------------------
// Dependency graph

void DependencyGraph::add_edge(const Locator& from, const Locator& to)
{
    nodes.insert(from);
    nodes.insert(to);
    edges.emplace(from, to);
}

std::vector<Locator> DependencyGraph::successors(const Locator& node) const
{
    std::vector<Locator> out;
    for (auto it = edges.lower_bound({node, Locator{}}); it != edges.end() && it->first == node; ++it)
        out.push_back(it->second);
    return out;
}

DependencyGraph build_graph(const Locator& entry, Resolver& resolver, const FlattenOptions& options)
{
    DependencyGraph graph;
    graph.roots.push_back(entry);
    graph.add_node(entry);

    std::set<Locator> visited{entry};
    std::deque<std::pair<Locator, std::size_t>> queue{{entry, 0}};
    while (!queue.empty()) {
        auto [current, depth] = queue.front();
        queue.pop_front();

        FragmentDocument doc;
        try {
            doc = parse_fragment(resolver.resolve(current).text, current.str());
        } catch (const Error& e) {
            graph.annotations[current] = e.what();
            continue;
        }
        std::vector<std::string> refs;
        collect_includes(doc.nodes, refs);
        for (const auto& ref : refs) {
            Locator target;
            try {
                target = canonicalize(current, ref, options.sandbox_root);
            } catch (const LocatorError& e) {
                graph.annotations[current] = e.what();
                continue;
            }
            graph.add_edge(current, target);
            if (!visited.insert(target).second)
                continue;
            if (depth + 1 > options.max_depth) {
                graph.annotations[target] = "not expanded: include depth exceeds " + std::to_string(options.max_depth);
                continue;
            }
            queue.emplace_back(target, depth + 1);
        }
    }
    return graph;
}

// ---------------------------------------------------------------------------
// Elementary cycles (Johnson's algorithm over the reachable subgraph)

namespace {

class CycleFinder {
public:
    explicit CycleFinder(const std::vector<std::vector<std::size_t>>& adjacency)
        : m_adj(adjacency), m_blocked(adjacency.size()), m_block_map(adjacency.size())
    {
    }

    std::vector<std::vector<std::size_t>> run()
    {
        const std::size_t n = m_adj.size();
        std::size_t s = 0;
        while (s < n) {
            auto [start, members] = least_nontrivial_component(s);
            if (start == n)
                break;
            m_members = std::move(members);
            for (std::size_t v = 0; v < n; ++v) {
                if (m_members[v]) {
                    m_blocked[v] = false;
                    m_block_map[v].clear();
                }
            }
            m_start = start;
            circuit(start);
            s = start + 1;
        }
        return std::move(m_cycles);
    }

private:
    // Strongly connected components of the subgraph induced by vertices >= s;
    // returns the least vertex lying on a component that contains a cycle,
    // together with that component's members.
    std::pair<std::size_t, std::vector<bool>> least_nontrivial_component(std::size_t s) const
    {
        const std::size_t n = m_adj.size();
        std::vector<std::size_t> index(n, npos), low(n, 0), comp(n, npos);
        std::vector<bool> on_stack(n, false);
        std::vector<std::size_t> stack;
        std::size_t counter = 0, comp_count = 0;

        // Iterative Tarjan.
        for (std::size_t root = s; root < n; ++root) {
            if (index[root] != npos)
                continue;
            std::vector<std::pair<std::size_t, std::size_t>> work{{root, 0}};
            index[root] = low[root] = counter++;
            stack.push_back(root);
            on_stack[root] = true;
            while (!work.empty()) {
                auto& [v, i] = work.back();
                if (i < m_adj[v].size()) {
                    std::size_t w = m_adj[v][i++];
                    if (w < s)
                        continue;
                    if (index[w] == npos) {
                        index[w] = low[w] = counter++;
                        stack.push_back(w);
                        on_stack[w] = true;
                        work.emplace_back(w, 0);
                    } else if (on_stack[w]) {
                        low[v] = std::min(low[v], index[w]);
                    }
                    continue;
                }
                std::size_t done = v;
                work.pop_back();
                if (!work.empty())
                    low[work.back().first] = std::min(low[work.back().first], low[done]);
                if (low[done] == index[done]) {
                    std::size_t w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp[w] = comp_count;
                    } while (w != done);
                    ++comp_count;
                }
            }
        }

        std::vector<std::size_t> size(comp_count, 0);
        for (std::size_t v = s; v < n; ++v)
            ++size[comp[v]];
        for (std::size_t v = s; v < n; ++v) {
            bool self_loop = std::find(m_adj[v].begin(), m_adj[v].end(), v) != m_adj[v].end();
            if (size[comp[v]] > 1 || self_loop) {
                std::vector<bool> members(n, false);
                for (std::size_t u = s; u < n; ++u)
                    members[u] = comp[u] == comp[v];
                return {v, std::move(members)};
            }
        }
        return {n, {}};
    }

    void unblock(std::size_t u)
    {
        m_blocked[u] = false;
        auto pending = std::move(m_block_map[u]);
        m_block_map[u].clear();
        for (std::size_t w : pending) {
            if (m_blocked[w])
                unblock(w);
        }
    }

    bool circuit(std::size_t v)
    {
        bool found = false;
        m_path.push_back(v);
        m_blocked[v] = true;
        for (std::size_t w : m_adj[v]) {
            if (!m_members[w])
                continue;
            if (w == m_start) {
                m_cycles.push_back(m_path);
                found = true;
            } else if (!m_blocked[w] && circuit(w)) {
                found = true;
            }
        }
        if (found) {
            unblock(v);
        } else {
            for (std::size_t w : m_adj[v]) {
                if (!m_members[w])
                    continue;
                auto& b = m_block_map[w];
                if (std::find(b.begin(), b.end(), v) == b.end())
                    b.push_back(v);
            }
        }
        m_path.pop_back();
        return found;
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    const std::vector<std::vector<std::size_t>>& m_adj;
    std::vector<bool> m_blocked;
    std::vector<std::vector<std::size_t>> m_block_map;
    std::vector<bool> m_members;
    std::vector<std::size_t> m_path;
    std::vector<std::vector<std::size_t>> m_cycles;
    std::size_t m_start = 0;
};

std::set<Locator> reachable(const DependencyGraph& graph)
{
    std::set<Locator> seen;
    std::vector<Locator> todo;
    for (const auto& r : graph.roots) {
        if (seen.insert(r).second)
            todo.push_back(r);
    }
    while (!todo.empty()) {
        Locator v = todo.back();
        todo.pop_back();
        for (auto& w : graph.successors(v)) {
            if (seen.insert(w).second)
                todo.push_back(w);
        }
    }
    return seen;
}

} // namespace

std::vector<Cycle> detect_cycles(const DependencyGraph& graph)
{
    std::set<Locator> live = reachable(graph);
    // std::set order makes vertex index order equal locator order, so every
    // cycle Johnson's algorithm reports already starts at its smallest member.
    std::vector<Locator> vertices(live.begin(), live.end());
    std::map<Locator, std::size_t> index;
    for (std::size_t i = 0; i < vertices.size(); ++i)
        index[vertices[i]] = i;

    std::vector<std::vector<std::size_t>> adjacency(vertices.size());
    for (const auto& [from, to] : graph.edges) {
        auto f = index.find(from);
        auto t = index.find(to);
        if (f != index.end() && t != index.end())
            adjacency[f->second].push_back(t->second);
    }

    std::vector<Cycle> cycles;
    for (const auto& raw : CycleFinder(adjacency).run()) {
        Cycle cycle;
        for (std::size_t v : raw)
            cycle.push_back(vertices[v]);
        cycles.push_back(std::move(cycle));
    }
    std::sort(cycles.begin(), cycles.end());
    return cycles;
}

// ---------------------------------------------------------------------------
// Formatting

namespace {

std::set<std::pair<Locator, Locator>> cycle_edges(const std::vector<Cycle>& cycles)
{
    std::set<std::pair<Locator, Locator>> out;
    for (const auto& c : cycles) {
        for (std::size_t i = 0; i < c.size(); ++i)
            out.emplace(c[i], c[(i + 1) % c.size()]);
    }
    return out;
}

std::string cycle_text(const Cycle& cycle, const std::filesystem::path& rel)
{
    std::string out;
    for (const auto& l : cycle)
        out += display_locator(l, rel) + " -> ";
    return out + display_locator(cycle.front(), rel);
}

std::string dot_id(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out + '"';
}

std::string one_line(std::string s)
{
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

} // namespace

std::string format_graph_edges(const DependencyGraph& graph, const std::filesystem::path& relative_to)
{
    std::string out = "# nodes: " + std::to_string(graph.nodes.size()) + ", edges: "
        + std::to_string(graph.edges.size()) + "\n";
    for (const auto& node : graph.nodes) {
        bool linked = std::any_of(graph.edges.begin(), graph.edges.end(),
                                  [&](const auto& e) { return e.first == node || e.second == node; });
        if (!linked)
            out += display_locator(node, relative_to) + "\n";
    }
    for (const auto& [from, to] : graph.edges)
        out += display_locator(from, relative_to) + " -> " + display_locator(to, relative_to) + "\n";
    for (const auto& cycle : detect_cycles(graph))
        out += "# cycle: " + cycle_text(cycle, relative_to) + "\n";
    for (const auto& [node, note] : graph.annotations)
        out += "# unresolved: " + display_locator(node, relative_to) + ": " + one_line(note) + "\n";
    return out;
}

std::string format_graph_dot(const DependencyGraph& graph, const std::filesystem::path& relative_to)
{
    auto cycles = detect_cycles(graph);
    auto on_cycle = cycle_edges(cycles);
    std::string out = "digraph zjsc {\n";
    for (const auto& node : graph.nodes) {
        out += "  " + dot_id(display_locator(node, relative_to));
        if (graph.annotations.contains(node))
            out += " [style=dashed]";
        out += ";\n";
    }
    for (const auto& edge : graph.edges) {
        out += "  " + dot_id(display_locator(edge.first, relative_to)) + " -> "
            + dot_id(display_locator(edge.second, relative_to));
        if (on_cycle.contains(edge))
            out += " [color=red]";
        out += ";\n";
    }
    for (const auto& cycle : cycles)
        out += "  // cycle: " + cycle_text(cycle, relative_to) + "\n";
    return out + "}\n";
}

} // namespace zjsc
