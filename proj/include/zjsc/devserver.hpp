#pragma once

// Development HTTP server: static files under a root plus the flatten and
// graph endpoints, with an optional polling watcher that invalidates the
// resolver cache.

#include "zjsc/resolver.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

namespace zjsc {

inline constexpr int default_port = 8337;

struct ServeOptions {
    std::filesystem::path root;
    std::string host = "127.0.0.1";
    int port = default_port; // 0 picks a free port
    bool watch = false;
    std::chrono::milliseconds watch_interval{200};
};

/// Maps the raw request target (path and optional query, still
/// percent-encoded) to a file under `root`. nullopt means forbidden: the
/// target contains a `..` segment, a NUL, a bad escape, or resolves (through
/// symlinks too) outside root. `root` must be canonical.
std::optional<std::filesystem::path> map_request_path(const std::filesystem::path& root, std::string_view target);

/// Quoted lowercase hex SHA-256 of `content`.
std::string content_etag(std::string_view content);

/// True when an If-None-Match header value names `etag` (or is `*`).
bool etag_matches(std::string_view if_none_match, std::string_view etag);

std::string content_type_for(const std::filesystem::path& path);

struct HttpResponse {
    int status = 200;
    std::map<std::string, std::string> headers;
    std::string body;
};

class DevServer {
public:
    explicit DevServer(ServeOptions options);
    ~DevServer();

    DevServer(const DevServer&) = delete;
    DevServer& operator=(const DevServer&) = delete;

    /// Binds the listening socket; false when the address is unavailable.
    bool bind();
    int port() const noexcept { return m_port; }

    /// Serves until stop(). Requires a successful bind().
    void run();
    /// run() on a background thread.
    void start();
    void stop();

    /// Request handling without the socket layer. `target` is the raw
    /// request target.
    HttpResponse handle(std::string_view target, const std::map<std::string, std::string>& headers);

    Resolver& resolver() noexcept { return m_resolver; }
    const std::filesystem::path& root() const noexcept { return m_root; }

    /// One watcher pass: invalidates every cached locator whose file changed
    /// since the previous pass. Returns the number invalidated.
    std::size_t poll_changes();

private:
    HttpResponse serve_file(const std::filesystem::path& file, const std::map<std::string, std::string>& headers);
    HttpResponse serve_flatten(const std::map<std::string, std::string>& query);
    HttpResponse serve_graph(const std::map<std::string, std::string>& query);
    void start_watcher();
    void watch_loop();

    struct Impl;
    std::unique_ptr<Impl> m_impl;
    ServeOptions m_options;
    std::filesystem::path m_root;
    int m_port = 0;
    Resolver m_resolver;
    std::mutex m_watch_mutex;
    std::map<std::filesystem::path, std::filesystem::file_time_type> m_mtimes;
    std::atomic<bool> m_stopping{false};
    std::thread m_server_thread;
    std::thread m_watch_thread;
};

} // namespace zjsc
