#include "zjsc/selector.hpp"

#include <cctype>

namespace zjsc {

namespace {

bool is_name_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'
        || static_cast<unsigned char>(c) >= 0x80;
}

bool is_space(char c)
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

class SelectorParser {
public:
    explicit SelectorParser(std::string_view text) : m_text(text) {}

    Selector parse()
    {
        Selector selector;
        skip_space();
        while (m_pos < m_text.size()) {
            selector.compounds.push_back(compound());
            std::size_t before = m_pos;
            skip_space();
            if (m_pos < m_text.size() && m_pos == before)
                fail("unsupported combinator");
        }
        if (selector.compounds.empty())
            fail("empty selector");
        return selector;
    }

private:
    [[noreturn]] void fail(const std::string& why) const
    {
        throw SelectorError("invalid selector '" + std::string(m_text) + "': " + why + " at offset "
                            + std::to_string(m_pos));
    }

    void skip_space()
    {
        while (m_pos < m_text.size() && is_space(m_text[m_pos]))
            ++m_pos;
    }

    std::string name(bool lower)
    {
        std::size_t begin = m_pos;
        while (m_pos < m_text.size() && is_name_char(m_text[m_pos]))
            ++m_pos;
        if (m_pos == begin)
            fail("expected a name");
        std::string out(m_text.substr(begin, m_pos - begin));
        if (lower) {
            for (auto& c : out)
                c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
        return out;
    }

    CompoundSelector compound()
    {
        CompoundSelector c;
        bool any = false;
        if (m_text[m_pos] == '*') {
            ++m_pos;
            any = true;
        } else if (is_name_char(m_text[m_pos])) {
            c.tag = name(true);
            any = true;
        }
        while (m_pos < m_text.size()) {
            char ch = m_text[m_pos];
            if (ch == '#') {
                ++m_pos;
                c.ids.push_back(name(false));
            } else if (ch == '.') {
                ++m_pos;
                c.classes.push_back(name(false));
            } else if (ch == '[') {
                ++m_pos;
                c.attributes.push_back(attribute());
            } else {
                break;
            }
            any = true;
        }
        if (!any)
            fail("expected a simple selector");
        return c;
    }

    AttributeCondition attribute()
    {
        AttributeCondition cond;
        skip_space();
        cond.name = name(true);
        skip_space();
        if (m_pos < m_text.size() && m_text[m_pos] == '=') {
            ++m_pos;
            skip_space();
            if (m_pos < m_text.size() && (m_text[m_pos] == '"' || m_text[m_pos] == '\'')) {
                char q = m_text[m_pos];
                std::size_t close = m_text.find(q, m_pos + 1);
                if (close == std::string_view::npos)
                    fail("unterminated string");
                cond.value = std::string(m_text.substr(m_pos + 1, close - m_pos - 1));
                m_pos = close + 1;
            } else {
                cond.value = name(false);
            }
            skip_space();
        }
        if (m_pos >= m_text.size() || m_text[m_pos] != ']')
            fail("expected ']'");
        ++m_pos;
        return cond;
    }

    std::string_view m_text;
    std::size_t m_pos = 0;
};

} // namespace

Selector parse_selector(std::string_view text)
{
    return SelectorParser(text).parse();
}

} // namespace zjsc
