#include "zjsc/devserver.hpp"

#include "zjsc/composer.hpp"
#include "zjsc/error.hpp"
#include "zjsc/fragment.hpp"

#include <httplib.h>
#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace zjsc {

namespace fs = std::filesystem;

namespace {

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

std::optional<std::string> strict_percent_decode(std::string_view in)
{
    std::string out;
    out.reserve(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (in[i] != '%') {
            out += in[i];
            continue;
        }
        if (i + 2 >= in.size())
            return std::nullopt;
        int hi = hex_value(in[i + 1]);
        int lo = hex_value(in[i + 2]);
        if (hi < 0 || lo < 0)
            return std::nullopt;
        out += static_cast<char>(hi * 16 + lo);
        i += 2;
    }
    return out;
}

bool is_within(const fs::path& root, const fs::path& path)
{
    auto [r, p] = std::mismatch(root.begin(), root.end(), path.begin(), path.end());
    // A trailing empty component from "root/" is not significant.
    return r == root.end() || (std::next(r) == root.end() && r->empty());
}

/// `path` with symlinks resolved, when that stays inside root.
std::optional<fs::path> contained(const fs::path& root, const fs::path& path)
{
    std::error_code ec;
    fs::path resolved = fs::weakly_canonical(path, ec);
    if (ec || !is_within(root, resolved))
        return std::nullopt;
    return resolved;
}

/// File loader that refuses anything resolving outside root.
Loader sandboxed_loader(fs::path root)
{
    return [root = std::move(root)](const Locator& locator) -> LoadResult {
        if (locator.is_url() || !contained(root, locator.path()))
            throw LocatorError("outside the served root: " + locator.str());
        return load_file(locator);
    };
}

std::map<std::string, std::string> parse_query(std::string_view target)
{
    std::map<std::string, std::string> out;
    auto q = target.find('?');
    if (q == std::string_view::npos)
        return out;
    httplib::Params params;
    httplib::detail::parse_query_text(std::string(target.substr(q + 1)), params);
    for (const auto& [key, value] : params)
        out.emplace(key, value); // first occurrence wins
    return out;
}

HttpResponse text_response(int status, std::string body, std::string type = "text/plain; charset=utf-8")
{
    HttpResponse r;
    r.status = status;
    r.headers["Content-Type"] = std::move(type);
    r.headers["Cache-Control"] = "no-cache";
    r.body = std::move(body);
    return r;
}

std::string relative_chain(const std::vector<std::string>& chain, const fs::path& root)
{
    std::vector<std::string> shown;
    for (const auto& item : chain)
        shown.push_back(display_locator(Locator(item), root));
    return join_chain(shown);
}

} // namespace

namespace {

/// Maps an already decoded '/'-separated path below root.
std::optional<fs::path> map_decoded_path(const fs::path& root, std::string decoded)
{
    if (decoded.find('\0') != std::string::npos)
        return std::nullopt;
    std::replace(decoded.begin(), decoded.end(), '\\', '/');

    fs::path rel;
    std::size_t pos = 0;
    while (pos <= decoded.size()) {
        std::size_t slash = decoded.find('/', pos);
        if (slash == std::string::npos)
            slash = decoded.size();
        std::string segment = decoded.substr(pos, slash - pos);
        pos = slash + 1;
        if (segment.empty() || segment == ".")
            continue;
        if (segment == "..")
            return std::nullopt;
        rel /= segment;
    }
    return contained(root, root / rel);
}

} // namespace

std::optional<fs::path> map_request_path(const fs::path& root, std::string_view target)
{
    std::string_view raw = target.substr(0, target.find_first_of("?#"));
    auto decoded = strict_percent_decode(raw);
    if (!decoded)
        return std::nullopt;
    return map_decoded_path(root, std::move(*decoded));
}

std::string content_etag(std::string_view content)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_Digest(content.data(), content.size(), digest, &length, EVP_sha256(), nullptr);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out = "\"";
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    out += '"';
    return out;
}

bool etag_matches(std::string_view if_none_match, std::string_view etag)
{
    std::size_t pos = 0;
    while (pos < if_none_match.size()) {
        std::size_t comma = if_none_match.find(',', pos);
        if (comma == std::string_view::npos)
            comma = if_none_match.size();
        std::string_view item = if_none_match.substr(pos, comma - pos);
        pos = comma + 1;
        while (!item.empty() && (item.front() == ' ' || item.front() == '\t'))
            item.remove_prefix(1);
        while (!item.empty() && (item.back() == ' ' || item.back() == '\t'))
            item.remove_suffix(1);
        if (item.starts_with("W/"))
            item.remove_prefix(2);
        if (item == "*" || item == etag)
            return true;
    }
    return false;
}

std::string content_type_for(const fs::path& path)
{
    static const std::map<std::string, std::string> types = {
        {".zjsc", "text/html; charset=utf-8"},
        {".html", "text/html; charset=utf-8"},
        {".htm", "text/html; charset=utf-8"},
        {".js", "text/javascript"},
        {".mjs", "text/javascript"},
        {".css", "text/css"},
        {".json", "application/json"},
        {".svg", "image/svg+xml"},
        {".png", "image/png"},
        {".txt", "text/plain; charset=utf-8"},
    };
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    auto it = types.find(ext);
    return it == types.end() ? "application/octet-stream" : it->second;
}

struct DevServer::Impl {
    httplib::Server server;
};

DevServer::DevServer(ServeOptions options)
    : m_impl(std::make_unique<Impl>()), m_options(std::move(options)),
      m_root(fs::canonical(m_options.root)), m_resolver(sandboxed_loader(m_root))
{
    // SO_REUSEADDR only: a port another process listens on must fail bind().
    m_impl->server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    m_impl->server.Get(".*", [this](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> headers;
        for (const auto& [key, value] : req.headers) {
            std::string lower = key;
            std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
            headers.emplace(lower, value);
        }
        HttpResponse r = handle(req.target.empty() ? req.path : req.target, headers);
        res.status = r.status;
        std::string type = "text/plain";
        for (const auto& [key, value] : r.headers) {
            if (key == "Content-Type")
                type = value;
            else
                res.set_header(key, value);
        }
        if (r.status == 304)
            return;
        res.set_content(r.body, type);
    });
}

DevServer::~DevServer()
{
    stop();
}

bool DevServer::bind()
{
    if (m_options.port == 0) {
        m_port = m_impl->server.bind_to_any_port(m_options.host);
        return m_port > 0;
    }
    if (!m_impl->server.bind_to_port(m_options.host, m_options.port))
        return false;
    m_port = m_options.port;
    return true;
}

void DevServer::start_watcher()
{
    if (m_options.watch && !m_watch_thread.joinable()) {
        poll_changes();
        m_watch_thread = std::thread([this] { watch_loop(); });
    }
}

void DevServer::run()
{
    start_watcher();
    m_impl->server.listen_after_bind();
}

void DevServer::start()
{
    start_watcher();
    m_server_thread = std::thread([this] { m_impl->server.listen_after_bind(); });
    m_impl->server.wait_until_ready();
}

void DevServer::stop()
{
    m_stopping = true;
    m_impl->server.stop();
    if (m_server_thread.joinable())
        m_server_thread.join();
    if (m_watch_thread.joinable())
        m_watch_thread.join();
}

void DevServer::watch_loop()
{
    while (!m_stopping) {
        auto deadline = std::chrono::steady_clock::now() + m_options.watch_interval;
        while (!m_stopping && std::chrono::steady_clock::now() < deadline)
            std::this_thread::sleep_for(std::chrono::milliseconds(20));
        if (!m_stopping)
            poll_changes();
    }
}

std::size_t DevServer::poll_changes()
{
    std::lock_guard lock(m_watch_mutex);
    std::map<fs::path, fs::file_time_type> current;
    std::error_code ec;
    for (fs::recursive_directory_iterator it(m_root, ec), end; !ec && it != end; it.increment(ec)) {
        std::error_code file_ec;
        if (it->is_regular_file(file_ec))
            current.emplace(it->path(), it->last_write_time(file_ec));
    }

    std::size_t invalidated = 0;
    auto drop = [&](const fs::path& path) {
        if (m_resolver.invalidate(Locator::from_path(path)))
            ++invalidated;
    };
    for (const auto& [path, mtime] : current) {
        auto it = m_mtimes.find(path);
        if (it != m_mtimes.end() && it->second != mtime)
            drop(path);
    }
    for (const auto& [path, mtime] : m_mtimes) {
        if (!current.contains(path))
            drop(path);
    }
    m_mtimes = std::move(current);
    return invalidated;
}

HttpResponse DevServer::handle(std::string_view target, const std::map<std::string, std::string>& headers)
{
    std::string_view path = target.substr(0, target.find_first_of("?#"));
    if (path == "/__zjsc/flatten")
        return serve_flatten(parse_query(target));
    if (path == "/__zjsc/graph")
        return serve_graph(parse_query(target));

    auto file = map_request_path(m_root, target);
    if (!file)
        return text_response(403, "forbidden\n");
    std::error_code ec;
    if (fs::is_directory(*file, ec)) {
        file = contained(m_root, *file / "index.html");
        if (!file)
            return text_response(403, "forbidden\n");
    }
    if (!fs::is_regular_file(*file, ec))
        return text_response(404, "not found\n");
    return serve_file(*file, headers);
}

HttpResponse DevServer::serve_file(const fs::path& file, const std::map<std::string, std::string>& headers)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
        return text_response(403, "forbidden\n");
    std::ostringstream buf;
    buf << in.rdbuf();

    HttpResponse r;
    r.body = buf.str();
    r.headers["Content-Type"] = content_type_for(file);
    r.headers["Cache-Control"] = "no-cache";
    r.headers["ETag"] = content_etag(r.body);
    if (auto it = headers.find("if-none-match"); it != headers.end() && etag_matches(it->second, r.headers["ETag"])) {
        r.status = 304;
        r.body.clear();
        r.headers.erase("Content-Type");
    }
    return r;
}

HttpResponse DevServer::serve_flatten(const std::map<std::string, std::string>& query)
{
    auto entry = query.find("entry");
    if (entry == query.end() || entry->second.empty())
        return text_response(400, "missing entry parameter\n");
    auto file = map_decoded_path(m_root, entry->second);
    if (!file)
        return text_response(403, "forbidden\n");

    FlattenOptions options;
    options.sandbox_root = m_root;
    try {
        std::string html = serialize_fragment(flatten(Locator::from_path(*file), m_resolver, options));
        return text_response(200, std::move(html), "text/html; charset=utf-8");
    } catch (const CycleError& e) {
        return text_response(500, "include cycle: " + relative_chain(e.chain(), m_root) + "\n");
    } catch (const DepthExceeded& e) {
        return text_response(500, "include depth exceeds " + std::to_string(e.max_depth()) + ": "
                                      + relative_chain(e.chain(), m_root) + "\n");
    } catch (const FetchError& e) {
        std::string body = std::string(e.what()) + "\n";
        if (!e.chain().empty())
            body += "via: " + relative_chain(e.chain(), m_root) + "\n";
        bool missing_entry = e.kind() == FetchErrorKind::NotFound && e.chain().size() <= 1;
        return text_response(missing_entry ? 404 : 500, std::move(body));
    } catch (const LocatorError& e) {
        return text_response(403, std::string(e.what()) + "\n");
    } catch (const Error& e) {
        return text_response(500, std::string(e.what()) + "\n");
    }
}

HttpResponse DevServer::serve_graph(const std::map<std::string, std::string>& query)
{
    auto entry = query.find("entry");
    if (entry == query.end() || entry->second.empty())
        return text_response(400, "missing entry parameter\n");
    std::string format = "edges";
    if (auto f = query.find("format"); f != query.end())
        format = f->second;
    if (format != "edges" && format != "dot")
        return text_response(400, "format must be dot or edges\n");
    auto file = map_decoded_path(m_root, entry->second);
    if (!file)
        return text_response(403, "forbidden\n");

    FlattenOptions options;
    options.sandbox_root = m_root;
    Locator root = Locator::from_path(*file);
    DependencyGraph graph = build_graph(root, m_resolver, options);
    if (auto it = graph.annotations.find(root); it != graph.annotations.end())
        return text_response(404, it->second + "\n");
    if (format == "dot")
        return text_response(200, format_graph_dot(graph, m_root), "text/vnd.graphviz; charset=utf-8");
    return text_response(200, format_graph_edges(graph, m_root));
}

} // namespace zjsc
