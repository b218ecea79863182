#pragma once

// Build-time flattening of <zjs-component> include trees and the fragment
// dependency graph.

#include "zjsc/fragment.hpp"
#include "zjsc/locator.hpp"
#include "zjsc/resolver.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace zjsc {

struct FlattenOptions {
    std::size_t max_depth = 32;
    bool keep_scripts = true;
    bool keep_marker_attrs = true;
    // Keep the authoring `display` attribute on wrappers after it has been
    // translated to an inline style. Wrappers themselves are always kept.
    bool keep_tags = false;
    // When set, every fragment path must stay inside this directory.
    std::optional<std::filesystem::path> sandbox_root;
};

/// Flattens the page at `entry`: every <zjs-component remote-src> gets its
/// fragment (itself flattened) appended as children and is marked with
/// data-zjs-from. Wrappers already carrying the marker are not re-expanded.
///
/// Throws CycleError, DepthExceeded, FetchError (with the inclusion chain),
/// LocatorError or EncodingError.
FragmentDocument flatten(const Locator& entry, Resolver& resolver, const FlattenOptions& options = {});

/// Expands the includes of an already parsed page in place; `doc.source`
/// must hold the page's canonical locator.
void flatten_in_place(FragmentDocument& doc, Resolver& resolver, const FlattenOptions& options = {});

struct DependencyGraph {
    std::set<Locator> nodes;
    std::set<std::pair<Locator, Locator>> edges; // (includer, included)
    std::vector<Locator> roots;
    std::map<Locator, std::string> annotations;  // loads that failed, by locator

    void add_node(const Locator& node) { nodes.insert(node); }
    void add_edge(const Locator& from, const Locator& to);
    std::vector<Locator> successors(const Locator& node) const;
};

/// Every fragment reachable from `entry`. Cycles are recorded, not fatal;
/// each fragment is loaded once. Load failures become annotations.
DependencyGraph build_graph(const Locator& entry, Resolver& resolver, const FlattenOptions& options = {});

using Cycle = std::vector<Locator>;

/// Every elementary cycle reachable from the graph's roots, each rotated to
/// start at its smallest locator, sorted lexicographically.
std::vector<Cycle> detect_cycles(const DependencyGraph& graph);

/// Edge-list text: node and edge lines plus `# cycle:` and `# unresolved:`
/// comments. Locators are shown relative to `relative_to`.
std::string format_graph_edges(const DependencyGraph& graph, const std::filesystem::path& relative_to);

/// DOT digraph; edges on a cycle are drawn red.
std::string format_graph_dot(const DependencyGraph& graph, const std::filesystem::path& relative_to);

} // namespace zjsc
