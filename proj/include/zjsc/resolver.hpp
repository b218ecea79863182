#pragma once

// Fragment resolution with an in-process cache and single-flight
// deduplication: concurrent requests for one locator share one load.

#include "zjsc/locator.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <unordered_map>

namespace zjsc {

enum class SourceOrigin { File, Http, Cache };

const char* to_string(SourceOrigin origin);

struct FragmentSource {
    Locator locator;
    std::string text;
    std::chrono::steady_clock::time_point fetched_at;
    SourceOrigin origin = SourceOrigin::File;
};

struct ResolverStats {
    std::uint64_t requests = 0;
    std::uint64_t loads = 0;
    std::uint64_t cache_hits = 0;
    std::uint64_t coalesced = 0;

    friend bool operator==(const ResolverStats&, const ResolverStats&) = default;
};

struct LoadResult {
    std::string text;
    SourceOrigin origin = SourceOrigin::File;
};

/// Performs one underlying load. Throws FetchError on failure.
using Loader = std::function<LoadResult(const Locator&)>;

struct HttpOptions {
    std::chrono::milliseconds timeout{10'000};
    int max_redirects = 5;

    /// Defaults, with the timeout overridden by ZJSC_TIMEOUT_MS when set.
    static HttpOptions from_environment();
};

LoadResult load_file(const Locator& locator);
LoadResult load_http(const Locator& locator, const HttpOptions& options);

/// Dispatches on the locator: http(s) URLs over the network, paths from disk.
Loader default_loader(HttpOptions options = HttpOptions::from_environment());

class Resolver {
public:
    explicit Resolver(Loader loader = default_loader());

    Resolver(const Resolver&) = delete;
    Resolver& operator=(const Resolver&) = delete;

    /// Returns the fragment text for a canonical locator. Blocks while another
    /// caller's load of the same locator is in flight and shares its result.
    /// Failed loads are delivered to every waiter and are not cached.
    FragmentSource resolve(const Locator& locator);

    /// Drops a cached entry. A load in flight at the time of the call still
    /// completes for its waiters but its result is not cached.
    bool invalidate(const Locator& locator);

    ResolverStats stats() const;
    bool is_cached(const Locator& locator) const;
    bool is_in_flight(const Locator& locator) const;

private:
    struct Flight {
        std::shared_future<FragmentSource> result;
        bool stale = false;
    };

    Loader m_loader;
    mutable std::mutex m_mutex;
    std::unordered_map<Locator, FragmentSource> m_cache;
    std::unordered_map<Locator, Flight> m_in_flight;
    ResolverStats m_stats;
};

} // namespace zjsc
