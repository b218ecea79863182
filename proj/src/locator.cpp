#include "zjsc/locator.hpp"

#include "zjsc/error.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace zjsc {

namespace {

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Scheme of an absolute reference ("http", "file", ...), empty otherwise.
std::string scheme_of(std::string_view ref)
{
    if (ref.empty() || !std::isalpha(static_cast<unsigned char>(ref[0])))
        return {};
    for (std::size_t i = 1; i < ref.size(); ++i) {
        char c = ref[i];
        if (c == ':')
            return i == 1 ? std::string{} : lower(ref.substr(0, i)); // "C:" is a drive, not a scheme
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.')
            return {};
    }
    return {};
}

std::string_view strip_fragment(std::string_view ref)
{
    return ref.substr(0, ref.find('#'));
}

int hex_value(char c)
{
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}

std::string percent_decode(std::string_view s)
{
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size() && hex_value(s[i + 1]) >= 0 && hex_value(s[i + 2]) >= 0) {
            out += static_cast<char>(hex_value(s[i + 1]) * 16 + hex_value(s[i + 2]));
            i += 2;
        } else {
            out += s[i];
        }
    }
    return out;
}

struct UrlParts {
    std::string scheme;
    std::string authority;
    std::string path;
    std::string query; // including '?', may be empty
};

UrlParts split_url(std::string_view url)
{
    UrlParts parts;
    std::size_t colon = url.find(':');
    parts.scheme = lower(url.substr(0, colon));
    std::string_view rest = strip_fragment(url.substr(colon + 1));
    if (rest.starts_with("//")) {
        rest.remove_prefix(2);
        std::size_t end = rest.find_first_of("/?");
        parts.authority = lower(rest.substr(0, end));
        rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end);
    }
    std::size_t q = rest.find('?');
    parts.path = std::string(rest.substr(0, q));
    if (q != std::string_view::npos)
        parts.query = std::string(rest.substr(q));
    return parts;
}

std::string join_url(const UrlParts& p)
{
    std::string path = p.path.empty() ? "/" : remove_dot_segments(p.path);
    return p.scheme + "://" + p.authority + path + p.query;
}

std::string normalize_file_ref(std::string_view ref)
{
    ref = strip_fragment(ref);
    ref = ref.substr(0, ref.find('?'));
    std::string out = percent_decode(ref);
    std::replace(out.begin(), out.end(), '\\', '/');
    return out;
}

std::string root_string(const std::filesystem::path& root)
{
    std::string s = remove_dot_segments(std::filesystem::absolute(root).generic_string());
    while (s.size() > 1 && s.back() == '/')
        s.pop_back();
    return s;
}

bool within(const std::string& path, const std::string& root)
{
    if (root == "/")
        return true;
    return path == root || (path.starts_with(root) && path[root.size()] == '/');
}

} // namespace

Locator Locator::from_path(const std::filesystem::path& path)
{
    std::string s = std::filesystem::absolute(path).generic_string();
    std::replace(s.begin(), s.end(), '\\', '/');
    return Locator(remove_dot_segments(s));
}

bool Locator::is_url() const noexcept
{
    return m_value.starts_with("http://") || m_value.starts_with("https://");
}

std::string remove_dot_segments(std::string_view path)
{
    std::vector<std::string_view> out;
    bool trailing_slash = false;
    std::size_t i = 0;
    while (i <= path.size()) {
        std::size_t j = path.find('/', i);
        if (j == std::string_view::npos)
            j = path.size();
        std::string_view seg = path.substr(i, j - i);
        bool last = j == path.size();
        if (seg == "..") {
            if (!out.empty())
                out.pop_back();
            trailing_slash = last;
        } else if (seg == ".") {
            trailing_slash = last;
        } else if (seg.empty()) {
            trailing_slash = last && i > 0;
        } else {
            out.push_back(seg);
            trailing_slash = false;
        }
        i = j + 1;
    }
    std::string result;
    for (auto seg : out) {
        result += '/';
        result += seg;
    }
    if (result.empty() || trailing_slash)
        result += '/';
    return result;
}

Locator canonicalize(const Locator& base, std::string_view ref, const std::optional<std::filesystem::path>& sandbox_root)
{
    if (ref.empty())
        throw LocatorError("empty reference");

    std::string scheme = scheme_of(ref);
    Locator result;
    if (scheme == "http" || scheme == "https") {
        result = Locator(join_url(split_url(ref)));
    } else if (scheme == "file") {
        std::string_view rest = ref.substr(5);
        if (rest.starts_with("//"))
            rest = rest.substr(rest.find('/', 2) == std::string_view::npos ? rest.size() : rest.find('/', 2));
        result = Locator(remove_dot_segments(normalize_file_ref(rest)));
    } else if (!scheme.empty()) {
        throw LocatorError("unsupported scheme '" + scheme + "' in " + std::string(ref));
    } else if (base.is_url()) {
        UrlParts b = split_url(base.str());
        std::string_view r = strip_fragment(ref);
        if (r.starts_with("//")) {
            result = Locator(join_url(split_url(b.scheme + ":" + std::string(r))));
        } else {
            UrlParts out = b;
            std::size_t q = r.find('?');
            std::string_view rpath = r.substr(0, q);
            out.query = q == std::string_view::npos ? std::string{} : std::string(r.substr(q));
            if (rpath.empty()) {
                if (q == std::string_view::npos)
                    out.query = b.query;
            } else if (rpath.front() == '/') {
                out.path = std::string(rpath);
            } else {
                std::string dir = b.path.substr(0, b.path.rfind('/') + 1);
                out.path = (dir.empty() ? "/" : dir) + std::string(rpath);
            }
            result = Locator(join_url(out));
        }
    } else {
        std::string r = normalize_file_ref(ref);
        if (r.empty())
            throw LocatorError("reference has no path: " + std::string(ref));
        std::string joined;
        if (r.front() == '/') {
            joined = r;
        } else {
            std::string b = base.empty() ? Locator::from_path(std::filesystem::current_path() / "_").str() : base.str();
            if (!b.starts_with('/'))
                b = Locator::from_path(b).str();
            joined = b.substr(0, b.rfind('/') + 1) + r;
        }
        result = Locator(remove_dot_segments(joined));
    }

    if (sandbox_root) {
        if (result.is_url())
            throw LocatorError("remote locator not permitted in sandboxed mode: " + result.str());
        if (!within(result.str(), root_string(*sandbox_root)))
            throw LocatorError("reference escapes the served root: " + std::string(ref));
    }
    return result;
}

std::string display_locator(const Locator& locator, const std::filesystem::path& relative_to)
{
    if (locator.is_url())
        return locator.str();
    std::string root = root_string(relative_to);
    const std::string& s = locator.str();
    if (root != "/" && s.starts_with(root) && s.size() > root.size() && s[root.size()] == '/')
        return s.substr(root.size() + 1);
    if (root == "/" && s.size() > 1)
        return s.substr(1);
    return s;
}

std::string relative_reference(const Locator& target, const Locator& document)
{
    if (target.is_url() || document.is_url())
        return target.str();
    auto rel = target.path().lexically_relative(document.path().parent_path());
    if (rel.empty())
        return target.str();
    std::string out;
    for (char c : rel.generic_string()) {
        // Characters canonicalize would strip or decode from a path reference.
        if (c == '%' || c == '?' || c == '#' || c == '\\') {
            static constexpr char hex[] = "0123456789ABCDEF";
            out += '%';
            out += hex[static_cast<unsigned char>(c) >> 4];
            out += hex[static_cast<unsigned char>(c) & 0xf];
        } else {
            out += c;
        }
    }
    return out;
}

} // namespace zjsc
