#pragma once

// Hand-rolled input generators for the property tests.

#include "rng.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace zjsc::test {

inline void append_utf8(std::string& out, char32_t cp)
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

/// Valid UTF-8 of up to `max_len` code points, biased towards markup
/// punctuation so the tokenizer sees many partial constructs.
inline std::string random_utf8(Rng& rng, std::size_t max_len)
{
    static const std::string markup = "<>/!-=\"'&;#?xX \n\t[]{}()`\\";
    std::string out;
    std::size_t n = rng.below(max_len + 1);
    for (std::size_t i = 0; i < n; ++i) {
        switch (rng.below(6)) {
        case 0:
        case 1:
            out += markup[rng.below(markup.size())];
            break;
        case 2:
            out += static_cast<char>('a' + rng.below(26));
            break;
        case 3:
            append_utf8(out, static_cast<char32_t>(rng.range(0, 0x7F)));
            break;
        case 4:
            append_utf8(out, static_cast<char32_t>(rng.range(0x80, 0xD7FF)));
            break;
        default:
            append_utf8(out, rng.chance(0.5) ? static_cast<char32_t>(rng.range(0xE000, 0xFFFF))
                                             : static_cast<char32_t>(rng.range(0x10000, 0x10FFFF)));
            break;
        }
    }
    return out;
}

/// Arbitrary bytes, mostly not UTF-8.
inline std::string random_bytes(Rng& rng, std::size_t max_len)
{
    std::string out;
    std::size_t n = rng.below(max_len + 1);
    for (std::size_t i = 0; i < n; ++i)
        out += static_cast<char>(rng.below(256));
    return out;
}

/// Markup soup: well-formed pieces mixed with every recovery path the
/// parser has (stray end tags, unterminated comments, bogus declarations,
/// unclosed tags at EOF, raw-text near misses).
class FragmentGenerator {
public:
    explicit FragmentGenerator(Rng& rng) : m_rng(rng) {}

    std::string generate(std::size_t budget = 40)
    {
        std::string out;
        if (m_rng.chance(0.05))
            out += "\xEF\xBB\xBF";
        if (m_rng.chance(0.1))
            out += m_rng.chance(0.5) ? "<!DOCTYPE html>" : "<!doctype  HTML >";
        std::size_t n = m_rng.below(budget) + 1;
        for (std::size_t i = 0; i < n; ++i)
            piece(out, 0);
        if (m_rng.chance(0.1))
            out += tail();
        return out;
    }

private:
    void piece(std::string& out, int depth)
    {
        switch (m_rng.below(12)) {
        case 0:
        case 1:
        case 2: {
            std::string tag = m_rng.pick(tags());
            out += start_tag(tag);
            if (m_rng.chance(0.8) && depth < 5) {
                std::size_t k = m_rng.below(4);
                for (std::size_t i = 0; i < k; ++i)
                    piece(out, depth + 1);
            }
            if (m_rng.chance(0.85))
                out += "</" + case_mix(tag) + (m_rng.chance(0.1) ? " " : "") + ">";
            break;
        }
        case 3:
        case 4:
            out += text();
            break;
        case 5:
            out += raw_text_element();
            break;
        case 6:
            out += "<!--" + text() + (m_rng.chance(0.9) ? "-->" : "");
            break;
        case 7:
            out += "</" + m_rng.pick(tags()) + ">";
            break;
        case 8:
            out += m_rng.pick(std::vector<std::string>{"<!bogus decl>", "<?php echo 1 ?>", "</>", "</ 3>", "< b>",
                                                       "<", "a<b", "<3", "&", "&amp", "&#", "&#x;", "&#1114112;",
                                                       "&#xD800;", "&#0;", "<!>", "<!-->", "<!--->", "<br/>",
                                                       "<img src=x/>", "<p/>"});
            break;
        case 9:
            out += start_tag(m_rng.pick(std::vector<std::string>{"br", "img", "input", "hr", "meta", "wbr"}));
            break;
        case 10:
            out += "<zjs-component remote-src=\"" + word() + ".zjsc\"" + (m_rng.chance(0.3) ? " display=inline" : "")
                + ">" + (m_rng.chance(0.3) ? text() : "") + "</zjs-component>";
            break;
        default:
            out += "\n  ";
            break;
        }
    }

    std::string tail()
    {
        return m_rng.pick(std::vector<std::string>{"<div", "<div class=\"x", "<a href='", "<!--", "<script>x<",
                                                   "</di", "<!DOCTYPE", "<style>", "<p title=a"});
    }

    std::string raw_text_element()
    {
        std::string tag = m_rng.chance(0.7) ? "script" : "style";
        std::string body;
        std::size_t n = m_rng.below(6);
        for (std::size_t i = 0; i < n; ++i) {
            body += m_rng.pick(std::vector<std::string>{
                "if (a < b && c > d) {}", "</scr", "</" + tag + "x>", "<!-- not a comment -->", "'</p>'",
                "x = 1 &amp; 2;", "<b>bold?</b>", "\n", "function f() { return `</div>`; }", text()});
        }
        bool closed = m_rng.chance(0.9);
        return start_tag(tag) + body + (closed ? "</" + case_mix(tag) + ">" : "");
    }

    std::string start_tag(const std::string& tag)
    {
        std::string out = "<" + case_mix(tag);
        std::size_t k = m_rng.below(4);
        for (std::size_t i = 0; i < k; ++i) {
            out += m_rng.chance(0.9) ? " " : "\n";
            out += case_mix(m_rng.pick(attr_names()));
            switch (m_rng.below(5)) {
            case 0:
                break;
            case 1:
                out += "=" + word();
                break;
            case 2:
                out += "='" + attr_text('\'') + "'";
                break;
            default:
                out += "=\"" + attr_text('"') + "\"";
                break;
            }
        }
        if (m_rng.chance(0.1))
            out += " /";
        return out + ">";
    }

    std::string text()
    {
        std::string out;
        std::size_t n = m_rng.below(5) + 1;
        for (std::size_t i = 0; i < n; ++i) {
            out += m_rng.pick(std::vector<std::string>{"hello", " ", "caf\xC3\xA9", "&amp;", "&lt;", "&gt;",
                                                       "&quot;", "&#65;", "&#x263A;", "&nbsp;", "a > b", "1 & 2",
                                                       "\xF0\x9F\x98\x80", "\n", "'quote'", "\"dq\""});
        }
        return out;
    }

    std::string attr_text(char quote)
    {
        std::string out = text();
        std::erase(out, quote);
        return out;
    }

    std::string word()
    {
        std::string out;
        std::size_t n = m_rng.below(6) + 1;
        for (std::size_t i = 0; i < n; ++i)
            out += static_cast<char>('a' + m_rng.below(26));
        return out;
    }

    std::string case_mix(const std::string& s)
    {
        if (!m_rng.chance(0.15))
            return s;
        std::string out = s;
        for (auto& c : out) {
            if (m_rng.chance(0.5) && c >= 'a' && c <= 'z')
                c = static_cast<char>(c - 32);
        }
        return out;
    }

    static const std::vector<std::string>& tags()
    {
        static const std::vector<std::string> t = {"div", "p", "span", "a", "ul", "li", "b", "i", "section",
                                                   "table", "tr", "td", "button", "zjs-component", "h1"};
        return t;
    }

    static const std::vector<std::string>& attr_names()
    {
        static const std::vector<std::string> a = {"id", "class", "href", "data-x", "remote-src", "display",
                                                   "title", "onclick", "x", "data-zjs-from", "style"};
        return a;
    }

    Rng& m_rng;
};

/// Random directed graph on `n` vertices; each ordered pair (self loops
/// included) is an edge with probability `p`.
inline std::vector<std::pair<int, int>> random_digraph(Rng& rng, int n, double p)
{
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (rng.chance(p))
                edges.emplace_back(a, b);
        }
    }
    return edges;
}

} // namespace zjsc::test
