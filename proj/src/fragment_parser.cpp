#include "zjsc/error.hpp"
#include "zjsc/fragment.hpp"

#include <algorithm>
#include <array>
#include <cstdint>

namespace zjsc {

namespace {

constexpr std::array void_elements{
    std::string_view{"area"}, std::string_view{"base"},  std::string_view{"br"},
    std::string_view{"col"},  std::string_view{"embed"}, std::string_view{"hr"},
    std::string_view{"img"},  std::string_view{"input"}, std::string_view{"link"},
    std::string_view{"meta"}, std::string_view{"source"}, std::string_view{"track"},
    std::string_view{"wbr"},
};

bool is_space(char c) noexcept
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

bool is_alpha(char c) noexcept
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

char to_lower(char c) noexcept
{
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

bool starts_with_ci(std::string_view text, std::size_t pos, std::string_view prefix) noexcept
{
    if (text.size() - std::min(pos, text.size()) < prefix.size())
        return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (to_lower(text[pos + i]) != prefix[i])
            return false;
    }
    return true;
}

void append_utf8(std::string& out, std::uint32_t cp)
{
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

// Decodes the small entity set: &amp; &lt; &gt; &quot; and numeric references.
// Anything else is kept literally.
std::string decode_entities(std::string_view in)
{
    std::string out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        char c = in[i];
        if (c != '&') {
            out += c;
            ++i;
            continue;
        }
        auto rest = in.substr(i);
        if (rest.starts_with("&amp;")) {
            out += '&';
            i += 5;
        } else if (rest.starts_with("&lt;")) {
            out += '<';
            i += 4;
        } else if (rest.starts_with("&gt;")) {
            out += '>';
            i += 4;
        } else if (rest.starts_with("&quot;")) {
            out += '"';
            i += 6;
        } else if (rest.starts_with("&#")) {
            std::size_t j = 2;
            bool hex = false;
            if (j < rest.size() && (rest[j] == 'x' || rest[j] == 'X')) {
                hex = true;
                ++j;
            }
            std::size_t digits_begin = j;
            std::uint32_t cp = 0;
            bool overflow = false;
            while (j < rest.size()) {
                char d = rest[j];
                int v = -1;
                if (d >= '0' && d <= '9')
                    v = d - '0';
                else if (hex && d >= 'a' && d <= 'f')
                    v = d - 'a' + 10;
                else if (hex && d >= 'A' && d <= 'F')
                    v = d - 'A' + 10;
                if (v < 0)
                    break;
                cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
                if (cp > 0x10FFFF)
                    overflow = true, cp = 0x110000;
                ++j;
            }
            if (j == digits_begin || j >= rest.size() || rest[j] != ';') {
                out += '&';
                ++i;
                continue;
            }
            if (overflow || cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
                cp = 0xFFFD;
            append_utf8(out, cp);
            i += j + 1;
        } else {
            out += '&';
            ++i;
        }
    }
    return out;
}

class FragmentParser {
public:
    FragmentParser(std::string_view text, FragmentDocument& doc)
        : m_text(text), m_doc(doc) {}

    void run()
    {
        if (m_text.starts_with("\xEF\xBB\xBF"))
            m_pos = 3;
        while (m_pos < m_text.size()) {
            if (m_text[m_pos] == '<' && consume_markup())
                continue;
            consume_text();
        }
        while (!m_open.empty()) {
            warn("UnclosedElement", "<" + m_open.back().name + "> auto-closed at end of input",
                 m_open.back().offset);
            close_top();
        }
    }

private:
    std::vector<Node>& container()
    {
        return m_open.empty() ? m_doc.nodes : m_open.back().children;
    }

    void append(Node node)
    {
        auto& nodes = container();
        if (node.kind == NodeKind::Text) {
            if (node.data.empty())
                return;
            if (!nodes.empty() && nodes.back().kind == NodeKind::Text) {
                nodes.back().data += node.data;
                return;
            }
        }
        nodes.push_back(std::move(node));
    }

    void close_top()
    {
        Node node = std::move(m_open.back());
        m_open.pop_back();
        container().push_back(std::move(node));
    }

    void warn(std::string code, std::string message, std::size_t offset)
    {
        m_doc.diagnostics.push_back({Severity::Warning, std::move(code), std::move(message), offset});
    }

    // Text up to the next '<' that could begin markup. A '<' that does not
    // begin markup is literal.
    void consume_text()
    {
        std::size_t begin = m_pos;
        std::size_t end = m_text.find('<', m_pos + 1);
        if (end == std::string_view::npos)
            end = m_text.size();
        m_pos = end;
        Node node = Node::text(decode_entities(m_text.substr(begin, end - begin)));
        node.offset = begin;
        append(std::move(node));
    }

    // Returns false when the '<' at m_pos is plain text.
    bool consume_markup()
    {
        std::size_t start = m_pos;
        auto peek = [&](std::size_t k) { return start + k < m_text.size() ? m_text[start + k] : '\0'; };
        if (is_alpha(peek(1))) {
            consume_start_tag();
            return true;
        }
        if (peek(1) == '/') {
            if (is_alpha(peek(2))) {
                consume_end_tag();
                return true;
            }
            if (peek(2) == '>') {
                m_pos += 3;
                return true;
            }
            if (start + 2 >= m_text.size())
                return false;
            consume_bogus_comment(start + 2);
            return true;
        }
        if (peek(1) == '!') {
            if (m_text.substr(start).starts_with("<!--")) {
                consume_comment();
                return true;
            }
            if (starts_with_ci(m_text, start, "<!doctype")) {
                consume_doctype();
                return true;
            }
            consume_bogus_comment(start + 2);
            return true;
        }
        if (peek(1) == '?') {
            consume_bogus_comment(start + 1);
            return true;
        }
        return false;
    }

    std::string read_name(std::size_t& p, bool stop_at_equals)
    {
        std::string name;
        while (p < m_text.size()) {
            char c = m_text[p];
            if (is_space(c) || c == '/' || c == '>' || (stop_at_equals && c == '=' && !name.empty()))
                break;
            name += to_lower(c);
            ++p;
        }
        return name;
    }

    void skip_space(std::size_t& p)
    {
        while (p < m_text.size() && is_space(m_text[p]))
            ++p;
    }

    void consume_start_tag()
    {
        std::size_t start = m_pos;
        std::size_t p = start + 1;
        Node element = Node::element(read_name(p, false));
        element.offset = start;

        for (;;) {
            skip_space(p);
            if (p >= m_text.size()) {
                warn("EofInTag", "end of input inside <" + element.name + "> tag; tag dropped", start);
                m_pos = m_text.size();
                return;
            }
            char c = m_text[p];
            if (c == '>') {
                ++p;
                break;
            }
            if (c == '/') {
                ++p;
                continue;
            }
            std::size_t attr_offset = p;
            std::string name = read_name(p, true);
            skip_space(p);
            std::string value;
            if (p < m_text.size() && m_text[p] == '=') {
                ++p;
                skip_space(p);
                if (p >= m_text.size())
                    continue;
                char q = m_text[p];
                if (q == '"' || q == '\'') {
                    std::size_t close = m_text.find(q, p + 1);
                    if (close == std::string_view::npos) {
                        p = m_text.size();
                        continue;
                    }
                    value = decode_entities(m_text.substr(p + 1, close - p - 1));
                    p = close + 1;
                } else {
                    std::size_t b = p;
                    while (p < m_text.size() && !is_space(m_text[p]) && m_text[p] != '>')
                        ++p;
                    value = decode_entities(m_text.substr(b, p - b));
                }
            }
            if (element.has_attribute(name)) {
                warn("DuplicateAttribute", "duplicate attribute '" + name + "' on <" + element.name + "> ignored",
                     attr_offset);
                continue;
            }
            element.attributes.push_back({std::move(name), std::move(value)});
        }
        m_pos = p;

        if (is_void_element(element.name)) {
            append(std::move(element));
            return;
        }
        if (is_raw_text_element(element.name)) {
            consume_raw_text(std::move(element));
            return;
        }
        m_open.push_back(std::move(element));
    }

    void consume_raw_text(Node element)
    {
        std::string closing = "</" + element.name;
        std::size_t body_begin = m_pos;
        std::size_t search = m_pos;
        std::size_t body_end = m_text.size();
        std::size_t resume = m_text.size();
        for (;;) {
            std::size_t lt = m_text.find("</", search);
            if (lt == std::string_view::npos) {
                warn("UnclosedElement", "<" + element.name + "> auto-closed at end of input", element.offset);
                break;
            }
            std::size_t after = lt + closing.size();
            if (starts_with_ci(m_text, lt, closing) && after < m_text.size()
                && (is_space(m_text[after]) || m_text[after] == '/' || m_text[after] == '>')) {
                body_end = lt;
                std::size_t gt = m_text.find('>', after);
                resume = gt == std::string_view::npos ? m_text.size() : gt + 1;
                break;
            }
            search = lt + 2;
        }
        if (body_end > body_begin) {
            Node raw = Node::raw_text(std::string(m_text.substr(body_begin, body_end - body_begin)));
            raw.offset = body_begin;
            element.children.push_back(std::move(raw));
        }
        m_pos = resume;
        append(std::move(element));
    }

    void consume_end_tag()
    {
        std::size_t start = m_pos;
        std::size_t p = start + 2;
        std::string name = read_name(p, false);
        std::size_t gt = m_text.find('>', p);
        if (gt == std::string_view::npos) {
            warn("EofInTag", "end of input inside </" + name + "> tag; tag dropped", start);
            m_pos = m_text.size();
            return;
        }
        m_pos = gt + 1;

        auto it = std::find_if(m_open.rbegin(), m_open.rend(), [&](const Node& n) { return n.name == name; });
        if (it == m_open.rend()) {
            warn("StrayEndTag", "</" + name + "> has no matching open element; ignored", start);
            return;
        }
        std::size_t depth = static_cast<std::size_t>(it - m_open.rbegin());
        for (std::size_t i = 0; i < depth; ++i) {
            warn("MisnestedTag", "<" + m_open.back().name + "> implicitly closed by </" + name + ">",
                 m_open.back().offset);
            close_top();
        }
        close_top();
    }

    void consume_comment()
    {
        std::size_t start = m_pos;
        std::size_t body = start + 4;
        std::size_t end = m_text.find("-->", body);
        Node node;
        if (end == std::string_view::npos) {
            warn("UnterminatedComment", "comment runs to end of input", start);
            node = Node::comment(std::string(m_text.substr(body)));
            m_pos = m_text.size();
        } else {
            node = Node::comment(std::string(m_text.substr(body, end - body)));
            m_pos = end + 3;
        }
        node.offset = start;
        append(std::move(node));
    }

    void consume_bogus_comment(std::size_t body)
    {
        std::size_t start = m_pos;
        std::size_t end = m_text.find('>', body);
        if (end == std::string_view::npos)
            end = m_text.size();
        Node node = Node::comment(std::string(m_text.substr(body, end - body)));
        node.offset = start;
        m_pos = std::min(end + 1, m_text.size());
        append(std::move(node));
    }

    void consume_doctype()
    {
        std::size_t start = m_pos;
        std::size_t body = start + 9;
        std::size_t end = m_text.find('>', body);
        if (end == std::string_view::npos)
            end = m_text.size();
        std::string_view content = m_text.substr(body, end - body);
        while (!content.empty() && is_space(content.front()))
            content.remove_prefix(1);
        while (!content.empty() && is_space(content.back()))
            content.remove_suffix(1);
        Node node;
        node.kind = NodeKind::Doctype;
        node.data = std::string(content);
        node.offset = start;
        m_pos = std::min(end + 1, m_text.size());
        append(std::move(node));
    }

    std::string_view m_text;
    FragmentDocument& m_doc;
    std::size_t m_pos = 0;
    std::vector<Node> m_open;
};

} // namespace

bool is_void_element(std::string_view tag) noexcept
{
    return std::find(void_elements.begin(), void_elements.end(), tag) != void_elements.end();
}

bool is_raw_text_element(std::string_view tag) noexcept
{
    return tag == "script" || tag == "style";
}

std::optional<std::size_t> find_invalid_utf8(std::string_view text) noexcept
{
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        auto b0 = static_cast<unsigned char>(text[i]);
        if (b0 < 0x80) {
            ++i;
            continue;
        }
        std::size_t len;
        std::uint32_t min;
        std::uint32_t cp;
        if ((b0 & 0xE0) == 0xC0) {
            len = 2, min = 0x80, cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3, min = 0x800, cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4, min = 0x10000, cp = b0 & 0x07;
        } else {
            return i;
        }
        if (i + len > n)
            return i;
        for (std::size_t k = 1; k < len; ++k) {
            auto b = static_cast<unsigned char>(text[i + k]);
            if ((b & 0xC0) != 0x80)
                return i;
            cp = (cp << 6) | (b & 0x3F);
        }
        if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
            return i;
        i += len;
    }
    return std::nullopt;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset)
{
    offset = std::min(offset, text.size());
    std::size_t line = 1;
    std::size_t line_start = 0;
    for (std::size_t i = 0; i < offset; ++i) {
        if (text[i] == '\n') {
            ++line;
            line_start = i + 1;
        }
    }
    return {line, offset - line_start + 1};
}

FragmentDocument parse_fragment(std::string_view text, std::string source)
{
    if (auto bad = find_invalid_utf8(text)) {
        throw EncodingError(*bad, "invalid UTF-8 at byte " + std::to_string(*bad)
                                      + (source.empty() ? std::string{} : " of " + source));
    }
    FragmentDocument doc;
    doc.source = std::move(source);
    doc.byte_length = text.size();
    FragmentParser(text, doc).run();
    return doc;
}

} // namespace zjsc
