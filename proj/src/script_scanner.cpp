#include "zjsc/script_scanner.hpp"

#include <algorithm>
#include <array>

namespace zjsc {

const char* to_string(ScanIssueKind kind)
{
    switch (kind) {
    case ScanIssueKind::UnterminatedString: return "UnterminatedString";
    case ScanIssueKind::UnterminatedComment: return "UnterminatedComment";
    case ScanIssueKind::DuplicateMethod: return "DuplicateMethod";
    }
    return "?";
}

bool ScriptProfile::has_method(std::string_view name) const
{
    return std::find(methods.begin(), methods.end(), name) != methods.end();
}

bool ScanResult::has_errors() const
{
    return std::any_of(issues.begin(), issues.end(), [](const ScanIssue& i) { return i.is_error(); });
}

namespace {

// Keywords after which an expression (and so a regex literal) may start, and
// which never end an expression themselves.
constexpr std::array operator_keywords{
    std::string_view{"return"}, std::string_view{"typeof"},     std::string_view{"case"},
    std::string_view{"do"},     std::string_view{"else"},       std::string_view{"in"},
    std::string_view{"of"},     std::string_view{"new"},        std::string_view{"delete"},
    std::string_view{"void"},   std::string_view{"throw"},      std::string_view{"yield"},
    std::string_view{"await"},  std::string_view{"instanceof"}, std::string_view{"export"},
    std::string_view{"extends"}, std::string_view{"var"},       std::string_view{"let"},
    std::string_view{"const"},  std::string_view{"default"},
};

constexpr std::array control_keywords{
    std::string_view{"if"}, std::string_view{"while"}, std::string_view{"for"}, std::string_view{"with"},
};

bool is_ident_start(char c) noexcept
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$'
        || static_cast<unsigned char>(c) >= 0x80;
}

bool is_ident_part(char c) noexcept
{
    return is_ident_start(c) || (c >= '0' && c <= '9');
}

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& set, std::string_view word)
{
    return std::find(set.begin(), set.end(), word) != set.end();
}

enum class TokenType { None, Punct, Ident, Number, String, Regex, Template, ControlParen, Postfix };

class ScriptScanner {
public:
    explicit ScriptScanner(std::string_view src) : m_src(src) {}

    ScanResult run()
    {
        ScanResult result;
        m_result = &result;
        result.profile.span = {0, m_src.size()};
        while (m_pos < m_src.size())
            step();
        for (const auto& name : result.profile.methods) {
            result.profile.has_on_connected |= name == on_connected_hook;
            result.profile.has_on_disconnected |= name == on_disconnected_hook;
        }
        return result;
    }

private:
    void issue(ScanIssueKind kind, std::size_t offset, std::string detail)
    {
        m_result->issues.push_back({kind, offset, std::move(detail), {}});
    }

    void set_prev(TokenType type, std::string_view text = {})
    {
        m_prev = type;
        m_prev_text = text;
        m_newline = false;
    }

    bool prev_punct(std::string_view chars) const
    {
        return m_prev == TokenType::Punct && m_prev_text.size() == 1
            && chars.find(m_prev_text[0]) != std::string_view::npos;
    }

    bool prev_ends_expression() const
    {
        switch (m_prev) {
        case TokenType::Ident: return !contains(operator_keywords, m_prev_text);
        case TokenType::Number:
        case TokenType::String:
        case TokenType::Regex:
        case TokenType::Template:
        case TokenType::Postfix: return true;
        case TokenType::Punct: return prev_punct(")]");
        default: return false;
        }
    }

    // True when a token at the current position begins a statement.
    bool at_statement_start() const
    {
        if (m_prev == TokenType::None || prev_punct(";}"))
            return true;
        return m_newline && prev_ends_expression();
    }

    bool regex_allowed() const
    {
        if (m_prev == TokenType::None || m_prev == TokenType::ControlParen || prev_punct("(,=:[!&|?{};"))
            return true;
        return m_prev == TokenType::Ident && contains(operator_keywords, m_prev_text);
    }

    void skip_trivia()
    {
        while (m_pos < m_src.size()) {
            char c = m_src[m_pos];
            if (c == '\n' || c == '\r') {
                m_newline = true;
                ++m_pos;
            } else if (c == ' ' || c == '\t' || c == '\f' || c == '\v') {
                ++m_pos;
            } else if (c == '/' && m_pos + 1 < m_src.size() && m_src[m_pos + 1] == '/') {
                skip_line_comment();
            } else if (c == '/' && m_pos + 1 < m_src.size() && m_src[m_pos + 1] == '*') {
                skip_block_comment();
            } else {
                break;
            }
        }
    }

    void skip_line_comment()
    {
        while (m_pos < m_src.size() && m_src[m_pos] != '\n' && m_src[m_pos] != '\r')
            ++m_pos;
    }

    void skip_block_comment()
    {
        std::size_t start = m_pos;
        std::size_t end = m_src.find("*/", m_pos + 2);
        if (end == std::string_view::npos) {
            issue(ScanIssueKind::UnterminatedComment, start, "block comment runs to end of script");
            end = m_src.size();
        } else {
            end += 2;
        }
        if (m_src.substr(start, end - start).find_first_of("\r\n") != std::string_view::npos)
            m_newline = true;
        m_pos = end;
    }

    std::string_view read_ident()
    {
        std::size_t begin = m_pos;
        while (m_pos < m_src.size() && is_ident_part(m_src[m_pos]))
            ++m_pos;
        return m_src.substr(begin, m_pos - begin);
    }

    void scan_string(char quote)
    {
        std::size_t start = m_pos++;
        while (m_pos < m_src.size()) {
            char c = m_src[m_pos];
            if (c == '\\') {
                m_pos += 2;
                continue;
            }
            if (c == quote) {
                ++m_pos;
                set_prev(TokenType::String);
                return;
            }
            if (c == '\n' || c == '\r') {
                issue(ScanIssueKind::UnterminatedString, start, "string literal broken by a line terminator");
                set_prev(TokenType::String);
                return;
            }
            ++m_pos;
        }
        m_pos = m_src.size();
        issue(ScanIssueKind::UnterminatedString, start, "string literal runs to end of script");
    }

    // Continues a template literal at m_pos (just past '`' or a closing '}'
    // of a substitution). Stops at the closing backtick or at "${".
    void scan_template_chunk()
    {
        while (m_pos < m_src.size()) {
            char c = m_src[m_pos];
            if (c == '\\') {
                m_pos += 2;
                continue;
            }
            if (c == '`') {
                ++m_pos;
                m_templates.pop_back();
                set_prev(TokenType::Template);
                return;
            }
            if (c == '$' && m_pos + 1 < m_src.size() && m_src[m_pos + 1] == '{') {
                m_pos += 2;
                m_stack.push_back('$');
                set_prev(TokenType::Punct, "{");
                return;
            }
            ++m_pos;
        }
        m_pos = m_src.size();
        issue(ScanIssueKind::UnterminatedString, m_templates.back(), "template literal runs to end of script");
        m_templates.pop_back();
    }

    void scan_regex()
    {
        std::size_t p = m_pos + 1;
        bool in_class = false;
        while (p < m_src.size()) {
            char c = m_src[p];
            if (c == '\n' || c == '\r')
                break;
            if (c == '\\') {
                p += 2;
                continue;
            }
            if (c == '[')
                in_class = true;
            else if (c == ']')
                in_class = false;
            else if (c == '/' && !in_class) {
                ++p;
                while (p < m_src.size() && is_ident_part(m_src[p]))
                    ++p;
                break;
            }
            ++p;
        }
        m_pos = std::min(p, m_src.size());
        set_prev(TokenType::Regex);
    }

    void record_method(std::string_view name, std::size_t offset)
    {
        auto& methods = m_result->profile.methods;
        if (std::find(methods.begin(), methods.end(), name) != methods.end()) {
            issue(ScanIssueKind::DuplicateMethod, offset, std::string(name));
            return;
        }
        methods.emplace_back(name);
    }

    // At the keyword `function` in declaration position: reads `* name`.
    void scan_declaration_name()
    {
        skip_trivia();
        if (m_pos < m_src.size() && m_src[m_pos] == '*') {
            ++m_pos;
            skip_trivia();
        }
        if (m_pos < m_src.size() && is_ident_start(m_src[m_pos])) {
            std::size_t offset = m_pos;
            std::string_view name = read_ident();
            record_method(name, offset);
            set_prev(TokenType::Ident, name);
        }
    }

    void close_bracket(char open)
    {
        auto it = std::find(m_stack.rbegin(), m_stack.rend(), open);
        if (it == m_stack.rend())
            return;
        m_stack.erase(std::next(it).base(), m_stack.end());
    }

    void step()
    {
        skip_trivia();
        if (m_pos >= m_src.size())
            return;
        char c = m_src[m_pos];

        if (c == '\'' || c == '"') {
            scan_string(c);
            return;
        }
        if (c == '`') {
            m_templates.push_back(m_pos);
            ++m_pos;
            scan_template_chunk();
            return;
        }
        if (c == '/') {
            if (regex_allowed())
                scan_regex();
            else {
                ++m_pos;
                set_prev(TokenType::Punct, "/");
            }
            return;
        }
        if (is_ident_start(c)) {
            bool statement_start = at_statement_start();
            bool after_async = m_prev == TokenType::Ident && m_prev_text == "async" && m_async_at_statement;
            std::string_view word = read_ident();
            if (word == "function" && m_stack.empty() && (statement_start || after_async)) {
                set_prev(TokenType::Ident, word);
                scan_declaration_name();
                return;
            }
            m_async_at_statement = word == "async" && statement_start;
            set_prev(TokenType::Ident, word);
            return;
        }
        if (c >= '0' && c <= '9') {
            while (m_pos < m_src.size() && (is_ident_part(m_src[m_pos]) || m_src[m_pos] == '.'))
                ++m_pos;
            set_prev(TokenType::Number);
            return;
        }

        if ((c == '+' || c == '-') && m_pos + 1 < m_src.size() && m_src[m_pos + 1] == c) {
            // `x++` ends an expression; a `++` after a line break is a prefix.
            bool postfix = !m_newline && prev_ends_expression();
            m_pos += 2;
            set_prev(postfix ? TokenType::Postfix : TokenType::Punct, m_src.substr(m_pos - 2, 2));
            return;
        }

        ++m_pos;
        switch (c) {
        case '{':
        case '[':
            m_stack.push_back(c);
            break;
        case '(':
            m_stack.push_back(m_prev == TokenType::Ident && contains(control_keywords, m_prev_text) ? 'c' : '(');
            break;
        case '}':
            if (!m_stack.empty() && m_stack.back() == '$') {
                m_stack.pop_back();
                scan_template_chunk();
                return;
            }
            close_bracket('{');
            break;
        case ']':
            close_bracket('[');
            break;
        case ')':
            if (!m_stack.empty() && m_stack.back() == 'c') {
                m_stack.pop_back();
                set_prev(TokenType::ControlParen);
                return;
            }
            close_bracket('(');
            break;
        default:
            break;
        }
        set_prev(TokenType::Punct, m_src.substr(m_pos - 1, 1));
    }

    std::string_view m_src;
    std::size_t m_pos = 0;
    ScanResult* m_result = nullptr;

    // Open brackets: '{', '(', '[', 'c' for a control-statement header and
    // '$' for a template substitution.
    std::vector<char> m_stack;
    std::vector<std::size_t> m_templates; // start offsets of open template literals

    TokenType m_prev = TokenType::None;
    std::string_view m_prev_text;
    bool m_newline = false;
    bool m_async_at_statement = false;
};

void merge_into(ScanResult& merged, ScanResult part, std::size_t body_offset, const NodePath& element)
{
    for (auto& issue : part.issues) {
        issue.offset += body_offset;
        issue.element = element;
        merged.issues.push_back(std::move(issue));
    }
    for (auto& name : part.profile.methods) {
        if (merged.profile.has_method(name)) {
            merged.issues.push_back({ScanIssueKind::DuplicateMethod, body_offset, name, element});
            continue;
        }
        merged.profile.methods.push_back(std::move(name));
    }
}

void collect_scripts(const std::vector<Node>& nodes, NodePath& path,
                     std::vector<std::pair<NodePath, const Node*>>& out)
{
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!nodes[i].is_element())
            continue;
        path.push_back(i);
        if (nodes[i].name == "script")
            out.emplace_back(path, &nodes[i]);
        else
            collect_scripts(nodes[i].children, path, out);
        path.pop_back();
    }
}

} // namespace

ScanResult scan_script(std::string_view body)
{
    return ScriptScanner(body).run();
}

ScanResult method_table(const FragmentDocument& doc)
{
    ScanResult merged;
    std::vector<std::pair<NodePath, const Node*>> scripts;
    NodePath path;
    collect_scripts(doc.nodes, path, scripts);

    bool first = true;
    for (const auto& [element, script] : scripts) {
        if (script->children.empty())
            continue;
        const Node& body = script->children.front();
        std::size_t offset = body.offset == npos_offset ? 0 : body.offset;
        merge_into(merged, scan_script(body.data), offset, element);
        ByteSpan span{offset, offset + body.data.size()};
        if (first) {
            merged.profile.span = span;
            first = false;
        } else {
            merged.profile.span.begin = std::min(merged.profile.span.begin, span.begin);
            merged.profile.span.end = std::max(merged.profile.span.end, span.end);
        }
    }
    for (const auto& name : merged.profile.methods) {
        merged.profile.has_on_connected |= name == on_connected_hook;
        merged.profile.has_on_disconnected |= name == on_disconnected_hook;
    }
    return merged;
}

} // namespace zjsc
