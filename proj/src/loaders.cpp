#include "zjsc/error.hpp"
#include "zjsc/resolver.hpp"

#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace zjsc {

HttpOptions HttpOptions::from_environment()
{
    HttpOptions options;
    if (const char* env = std::getenv("ZJSC_TIMEOUT_MS")) {
        char* end = nullptr;
        long long ms = std::strtoll(env, &end, 10);
        if (end != env && *end == '\0' && ms > 0)
            options.timeout = std::chrono::milliseconds(ms);
    }
    return options;
}

LoadResult load_file(const Locator& locator)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::path path = locator.path();
    auto status = fs::status(path, ec);
    if (ec || !fs::exists(status))
        throw FetchError(FetchErrorKind::NotFound, locator.str(), "no such file");
    if (fs::is_directory(status))
        throw FetchError(FetchErrorKind::Io, locator.str(), "is a directory");

    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FetchError(FetchErrorKind::Io, locator.str(), "cannot open file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad())
        throw FetchError(FetchErrorKind::Io, locator.str(), "read failed");
    return {buffer.str(), SourceOrigin::File};
}

namespace {

struct SplitUrl {
    std::string origin; // scheme://host[:port]
    std::string target; // path and query
};

SplitUrl split(const std::string& url)
{
    std::size_t authority = url.find("://") + 3;
    std::size_t slash = url.find('/', authority);
    if (slash == std::string::npos)
        return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

} // namespace

LoadResult load_http(const Locator& locator, const HttpOptions& options)
{
    Locator current = locator;
    auto started = std::chrono::steady_clock::now();
    for (int redirects = 0;; ++redirects) {
        SplitUrl url = split(current.str());
        httplib::Client client(url.origin);
        client.set_follow_location(false);
        client.set_connection_timeout(options.timeout);
        client.set_read_timeout(options.timeout);
        client.set_write_timeout(options.timeout);

        auto res = client.Get(url.target);
        if (!res) {
            auto error = res.error();
            bool timed_out = error == httplib::Error::ConnectionTimeout
                || std::chrono::steady_clock::now() - started >= options.timeout;
            throw FetchError(timed_out ? FetchErrorKind::Timeout : FetchErrorKind::Io, locator.str(),
                             httplib::to_string(error));
        }
        if (res->status == 200)
            return {std::move(res->body), SourceOrigin::Http};

        bool redirect = res->status >= 300 && res->status < 400 && res->has_header("Location");
        if (!redirect)
            throw FetchError(FetchErrorKind::HttpStatus, locator.str(), "unexpected status", res->status);
        if (redirects >= options.max_redirects)
            throw FetchError(FetchErrorKind::HttpStatus, locator.str(), "too many redirects", res->status);
        try {
            current = canonicalize(current, res->get_header_value("Location"));
        } catch (const LocatorError& e) {
            throw FetchError(FetchErrorKind::Io, locator.str(), std::string("bad redirect: ") + e.what());
        }
        if (!current.is_url())
            throw FetchError(FetchErrorKind::Io, locator.str(), "redirect to a non-http location");
    }
}

Loader default_loader(HttpOptions options)
{
    return [options](const Locator& locator) {
        return locator.is_url() ? load_http(locator, options) : load_file(locator);
    };
}

} // namespace zjsc
