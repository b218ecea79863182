#pragma once

// The selector subset accepted by send(): type, `*`, `#id`, `.class`,
// `[attr]`, `[attr=value]` and the descendant combinator.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zjsc/error.hpp"

namespace zjsc {

struct AttributeCondition {
    std::string name;
    std::optional<std::string> value;
};

struct CompoundSelector {
    std::optional<std::string> tag; // absent for `*` or no type selector
    std::vector<std::string> ids;
    std::vector<std::string> classes;
    std::vector<AttributeCondition> attributes;
};

/// Compounds in source order; each is a descendant of the one before.
struct Selector {
    std::vector<CompoundSelector> compounds;
};

class SelectorError : public Error {
public:
    using Error::Error;
};

Selector parse_selector(std::string_view text);

/// Minimal element view the matcher needs. `Node` is any type with
/// `is_element()`, `name`, `attribute(name)` and `parent()` members.
template <typename Node>
bool matches_compound(const CompoundSelector& c, const Node& node)
{
    if (!node.is_element())
        return false;
    if (c.tag && node.name != *c.tag)
        return false;
    for (const auto& id : c.ids) {
        const std::string* v = node.attribute("id");
        if (!v || *v != id)
            return false;
    }
    if (!c.classes.empty()) {
        const std::string* v = node.attribute("class");
        if (!v)
            return false;
        for (const auto& cls : c.classes) {
            bool found = false;
            std::string_view rest = *v;
            while (!rest.empty() && !found) {
                auto start = rest.find_first_not_of(" \t\n\r\f");
                if (start == std::string_view::npos)
                    break;
                rest.remove_prefix(start);
                auto end = rest.find_first_of(" \t\n\r\f");
                found = rest.substr(0, end) == cls;
                rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end);
            }
            if (!found)
                return false;
        }
    }
    for (const auto& a : c.attributes) {
        const std::string* v = node.attribute(a.name);
        if (!v || (a.value && *v != *a.value))
            return false;
    }
    return true;
}

template <typename Node>
bool matches(const Selector& selector, const Node& node)
{
    const auto& cs = selector.compounds;
    if (cs.empty() || !matches_compound(cs.back(), node))
        return false;
    // Greedy ancestor walk; exact for a chain of descendant combinators.
    std::size_t remaining = cs.size() - 1;
    for (const Node* a = node.parent(); a && remaining > 0; a = a->parent()) {
        if (matches_compound(cs[remaining - 1], *a))
            --remaining;
    }
    return remaining == 0;
}

} // namespace zjsc
