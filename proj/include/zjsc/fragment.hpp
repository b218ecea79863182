#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace zjsc {

enum class Severity { Warning, Error };

struct Diagnostic {
    Severity severity = Severity::Warning;
    std::string code;     // stable identifier, e.g. "MissingRemoteSrc"
    std::string message;
    std::size_t offset = 0; // byte offset into the source text
};

enum class NodeKind {
    Element,
    Text,
    RawText, // body of a script or style element, kept byte-exact
    Comment,
    Doctype,
};

struct Attribute {
    std::string name;
    std::string value;

    friend bool operator==(const Attribute&, const Attribute&) = default;
};

inline constexpr std::size_t npos_offset = static_cast<std::size_t>(-1);

struct Node {
    NodeKind kind = NodeKind::Element;
    std::string name;                   // lowercased tag name (Element only)
    std::vector<Attribute> attributes;  // Element only, names unique
    std::vector<Node> children;         // Element only
    std::string data;                   // Text, RawText, Comment and Doctype payload
    std::size_t offset = npos_offset;   // byte offset of the node in its source

    static Node element(std::string name, std::vector<Attribute> attributes = {},
                        std::vector<Node> children = {});
    static Node text(std::string data);
    static Node raw_text(std::string data);
    static Node comment(std::string data);

    bool is_element() const noexcept { return kind == NodeKind::Element; }
    bool is_element(std::string_view tag) const noexcept { return is_element() && name == tag; }

    const std::string* attribute(std::string_view attr) const;
    bool has_attribute(std::string_view attr) const { return attribute(attr) != nullptr; }
    // Replaces the value if present, appends otherwise.
    void set_attribute(std::string_view attr, std::string value);
    bool remove_attribute(std::string_view attr);
};

bool operator==(const Node& a, const Node& b);

/// Path of child indices from the document's top-level node list.
using NodePath = std::vector<std::size_t>;

struct FragmentDocument {
    std::vector<Node> nodes;
    std::string source;        // locator the text was read from
    std::size_t byte_length = 0;
    std::vector<Diagnostic> diagnostics;

    const Node* at(const NodePath& path) const;
    Node* at(const NodePath& path);
};

/// Elements that never take children.
bool is_void_element(std::string_view tag) noexcept;
/// Elements whose content is captured as RawText.
bool is_raw_text_element(std::string_view tag) noexcept;

/// Parses an HTML fragment. Malformed markup is recovered, never rejected;
/// throws EncodingError when `text` is not UTF-8. A leading BOM is skipped.
FragmentDocument parse_fragment(std::string_view text, std::string source = {});

std::string serialize_fragment(const FragmentDocument& doc);
std::string serialize_nodes(const std::vector<Node>& nodes);
void serialize_node(const Node& node, std::string& out);

/// Validates UTF-8; returns the offset of the first invalid byte, if any.
std::optional<std::size_t> find_invalid_utf8(std::string_view text) noexcept;

/// Line and column (1-based) of a byte offset, for diagnostics.
std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset);

// ---------------------------------------------------------------------------
// Component occurrences

inline constexpr std::string_view component_tag = "zjs-component";
inline constexpr std::string_view remote_src_attr = "remote-src";
inline constexpr std::string_view display_attr = "display";
inline constexpr std::string_view marker_attr = "data-zjs-from";

struct ComponentSpec {
    std::string remote_src;
    std::vector<Attribute> attributes; // forwarded, excluding remote-src and display
    std::optional<std::string> display;
    NodePath element_ref;

    static ComponentSpec from_element(const Node& element, NodePath path = {});
};

struct ComponentScan {
    std::vector<ComponentSpec> specs;
    std::vector<Diagnostic> warnings; // MissingRemoteSrc, one per offending element
};

ComponentScan extract_component_specs(const FragmentDocument& doc);

/// Inline style of a wrapper after applying its display value: the existing
/// declarations, then `display:<value>`.
std::string merge_display_style(const std::string* existing_style, std::string_view display);

} // namespace zjsc
