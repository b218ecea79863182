#include "zjsc/resolver.hpp"

#include "zjsc/error.hpp"

namespace zjsc {

const char* to_string(SourceOrigin origin)
{
    switch (origin) {
    case SourceOrigin::File: return "file";
    case SourceOrigin::Http: return "http";
    case SourceOrigin::Cache: return "cache";
    }
    return "?";
}

Resolver::Resolver(Loader loader) : m_loader(std::move(loader)) {}

FragmentSource Resolver::resolve(const Locator& locator)
{
    std::unique_lock lock(m_mutex);
    ++m_stats.requests;

    if (auto it = m_cache.find(locator); it != m_cache.end()) {
        ++m_stats.cache_hits;
        FragmentSource hit = it->second;
        hit.origin = SourceOrigin::Cache;
        return hit;
    }
    if (auto it = m_in_flight.find(locator); it != m_in_flight.end()) {
        ++m_stats.coalesced;
        auto pending = it->second.result;
        lock.unlock();
        return pending.get();
    }

    std::promise<FragmentSource> promise;
    m_in_flight.emplace(locator, Flight{promise.get_future().share(), false});
    ++m_stats.loads;
    lock.unlock();

    try {
        LoadResult loaded = m_loader(locator);
        FragmentSource source{locator, std::move(loaded.text), std::chrono::steady_clock::now(), loaded.origin};

        lock.lock();
        auto flight = m_in_flight.find(locator);
        if (!flight->second.stale)
            m_cache.insert_or_assign(locator, source);
        m_in_flight.erase(flight);
        lock.unlock();

        promise.set_value(source);
        return source;
    } catch (...) {
        lock.lock();
        m_in_flight.erase(locator);
        lock.unlock();
        promise.set_exception(std::current_exception());
        throw;
    }
}

bool Resolver::invalidate(const Locator& locator)
{
    std::lock_guard lock(m_mutex);
    if (auto it = m_in_flight.find(locator); it != m_in_flight.end())
        it->second.stale = true;
    return m_cache.erase(locator) > 0;
}

ResolverStats Resolver::stats() const
{
    std::lock_guard lock(m_mutex);
    return m_stats;
}

bool Resolver::is_cached(const Locator& locator) const
{
    std::lock_guard lock(m_mutex);
    return m_cache.contains(locator);
}

bool Resolver::is_in_flight(const Locator& locator) const
{
    std::lock_guard lock(m_mutex);
    return m_in_flight.contains(locator);
}

} // namespace zjsc
