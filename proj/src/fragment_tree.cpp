#include "zjsc/fragment.hpp"

#include <algorithm>
#include <utility>

namespace zjsc {

Node Node::element(std::string name, std::vector<Attribute> attributes, std::vector<Node> children)
{
    Node n;
    n.kind = NodeKind::Element;
    n.name = std::move(name);
    n.attributes = std::move(attributes);
    n.children = std::move(children);
    return n;
}

Node Node::text(std::string data)
{
    Node n;
    n.kind = NodeKind::Text;
    n.data = std::move(data);
    return n;
}

Node Node::raw_text(std::string data)
{
    Node n;
    n.kind = NodeKind::RawText;
    n.data = std::move(data);
    return n;
}

Node Node::comment(std::string data)
{
    Node n;
    n.kind = NodeKind::Comment;
    n.data = std::move(data);
    return n;
}

const std::string* Node::attribute(std::string_view attr) const
{
    for (const auto& a : attributes) {
        if (a.name == attr)
            return &a.value;
    }
    return nullptr;
}

void Node::set_attribute(std::string_view attr, std::string value)
{
    for (auto& a : attributes) {
        if (a.name == attr) {
            a.value = std::move(value);
            return;
        }
    }
    attributes.push_back({std::string(attr), std::move(value)});
}

bool Node::remove_attribute(std::string_view attr)
{
    auto it = std::find_if(attributes.begin(), attributes.end(), [&](const Attribute& a) { return a.name == attr; });
    if (it == attributes.end())
        return false;
    attributes.erase(it);
    return true;
}

// Source offsets are deliberately not part of structural equality.
bool operator==(const Node& a, const Node& b)
{
    return a.kind == b.kind && a.name == b.name && a.data == b.data && a.attributes == b.attributes
        && a.children == b.children;
}

const Node* FragmentDocument::at(const NodePath& path) const
{
    const std::vector<Node>* level = &nodes;
    const Node* node = nullptr;
    for (std::size_t index : path) {
        if (index >= level->size())
            return nullptr;
        node = &(*level)[index];
        level = &node->children;
    }
    return node;
}

Node* FragmentDocument::at(const NodePath& path)
{
    return const_cast<Node*>(std::as_const(*this).at(path));
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

void escape_text(std::string_view in, std::string& out)
{
    for (char c : in) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
}

void escape_attribute(std::string_view in, std::string& out)
{
    for (char c : in) {
        switch (c) {
        case '"': out += "&quot;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
}

} // namespace

void serialize_node(const Node& node, std::string& out)
{
    switch (node.kind) {
    case NodeKind::Text:
        escape_text(node.data, out);
        return;
    case NodeKind::RawText:
        out += node.data;
        return;
    case NodeKind::Comment:
        out += "<!--";
        out += node.data;
        out += "-->";
        return;
    case NodeKind::Doctype:
        out += node.data.empty() ? "<!DOCTYPE" : "<!DOCTYPE ";
        out += node.data;
        out += '>';
        return;
    case NodeKind::Element:
        break;
    }

    out += '<';
    out += node.name;
    for (const auto& attr : node.attributes) {
        out += ' ';
        out += attr.name;
        out += "=\"";
        escape_attribute(attr.value, out);
        out += '"';
    }
    out += '>';
    if (is_void_element(node.name))
        return;
    for (const auto& child : node.children)
        serialize_node(child, out);
    out += "</";
    out += node.name;
    out += '>';
}

std::string serialize_nodes(const std::vector<Node>& nodes)
{
    std::string out;
    for (const auto& node : nodes)
        serialize_node(node, out);
    return out;
}

std::string serialize_fragment(const FragmentDocument& doc)
{
    return serialize_nodes(doc.nodes);
}

// ---------------------------------------------------------------------------
// Component occurrences

ComponentSpec ComponentSpec::from_element(const Node& element, NodePath path)
{
    ComponentSpec spec;
    spec.element_ref = std::move(path);
    for (const auto& attr : element.attributes) {
        if (attr.name == remote_src_attr)
            spec.remote_src = attr.value;
        else if (attr.name == display_attr)
            spec.display = attr.value;
        else
            spec.attributes.push_back(attr);
    }
    return spec;
}

namespace {

void collect_specs(const std::vector<Node>& nodes, NodePath& path, ComponentScan& scan)
{
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Node& node = nodes[i];
        if (!node.is_element())
            continue;
        path.push_back(i);
        if (node.name == component_tag) {
            const std::string* src = node.attribute(remote_src_attr);
            if (src && !src->empty()) {
                scan.specs.push_back(ComponentSpec::from_element(node, path));
            } else {
                scan.warnings.push_back({Severity::Warning, "MissingRemoteSrc",
                                         "<zjs-component> without a non-empty remote-src attribute", node.offset});
            }
        }
        collect_specs(node.children, path, scan);
        path.pop_back();
    }
}

} // namespace

ComponentScan extract_component_specs(const FragmentDocument& doc)
{
    ComponentScan scan;
    NodePath path;
    collect_specs(doc.nodes, path, scan);
    return scan;
}

std::string merge_display_style(const std::string* existing_style, std::string_view display)
{
    std::string style = existing_style ? *existing_style : std::string();
    while (!style.empty() && (style.back() == ' ' || style.back() == '\t' || style.back() == '\n'))
        style.pop_back();
    if (!style.empty() && style.back() != ';')
        style += ';';
    style += "display:";
    style += display;
    return style;
}

} // namespace zjsc
