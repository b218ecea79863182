#include <doctest.h>

#include "zjsc/error.hpp"
#include "zjsc/resolver.hpp"

#include "support/oracles.hpp"
#include "support/paths.hpp"

#include <condition_variable>
#include <thread>

using namespace zjsc;
using namespace std::chrono_literals;

TEST_CASE("cached loads are counted as hits")
{
    test::MemoryLoader files;
    files.put("/m/a.zjsc", "A");
    Resolver r(files.loader());
    CHECK(r.resolve(Locator("/m/a.zjsc")).text == "A");
    CHECK(r.resolve(Locator("/m/a.zjsc")).text == "A");
    CHECK(r.is_cached(Locator("/m/a.zjsc")));
    ResolverStats s = r.stats();
    CHECK(s.requests == 2);
    CHECK(s.loads == 1);
    CHECK(s.cache_hits == 1);
    CHECK(s.coalesced == 0);
    CHECK(files.loads() == 1);
}

TEST_CASE("failures reach the caller and are not cached")
{
    test::MemoryLoader files;
    Resolver r(files.loader());
    CHECK_THROWS_AS(r.resolve(Locator("/m/missing.zjsc")), FetchError);
    files.put("/m/missing.zjsc", "now here");
    CHECK(r.resolve(Locator("/m/missing.zjsc")).text == "now here");
    CHECK(files.loads() == 2);
}

TEST_CASE("invalidate forces a reload")
{
    test::MemoryLoader files;
    files.put("/m/a.zjsc", "v1");
    Resolver r(files.loader());
    CHECK(r.resolve(Locator("/m/a.zjsc")).text == "v1");
    files.put("/m/a.zjsc", "v2");
    CHECK(r.resolve(Locator("/m/a.zjsc")).text == "v1");
    CHECK(r.invalidate(Locator("/m/a.zjsc")));
    CHECK_FALSE(r.invalidate(Locator("/m/a.zjsc")));
    CHECK(r.resolve(Locator("/m/a.zjsc")).text == "v2");
}

TEST_CASE("invalidating during a load keeps waiters served but skips the cache")
{
    std::mutex m;
    std::condition_variable cv;
    bool release = false;
    std::atomic<int> loads{0};
    Resolver r([&](const Locator&) -> LoadResult {
        int n = ++loads;
        std::unique_lock lock(m);
        cv.wait(lock, [&] { return release; });
        return {"v" + std::to_string(n), SourceOrigin::File};
    });
    Locator a("/m/a.zjsc");
    std::string first;
    std::thread t([&] { first = r.resolve(a).text; });
    while (!r.is_in_flight(a))
        std::this_thread::sleep_for(1ms);
    r.invalidate(a);
    {
        std::lock_guard lock(m);
        release = true;
    }
    cv.notify_all();
    t.join();
    CHECK(first == "v1");
    CHECK_FALSE(r.is_cached(a));
    CHECK(r.resolve(a).text == "v2");
}

TEST_CASE("concurrent failures are delivered to every waiter")
{
    std::atomic<int> calls{0};
    Resolver r([&](const Locator& l) -> LoadResult {
        ++calls;
        std::this_thread::sleep_for(50ms);
        throw FetchError(FetchErrorKind::Io, l.str(), "boom");
    });
    std::atomic<int> failures{0};
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i) {
        threads.emplace_back([&] {
            try {
                r.resolve(Locator("/m/x"));
            } catch (const FetchError&) {
                ++failures;
            }
        });
    }
    for (auto& t : threads)
        t.join();
    CHECK(failures == 8);
    ResolverStats s = r.stats();
    CHECK(s.requests == s.loads + s.cache_hits + s.coalesced);
    CHECK(s.loads == static_cast<std::uint64_t>(calls.load()));
}

TEST_CASE("load_file reads bytes and reports missing files")
{
    test::TempDir dir("resolver");
    test::write_file(dir / "a.zjsc", "<p>x</p>");
    CHECK(load_file(Locator::from_path(dir / "a.zjsc")).text == "<p>x</p>");
    try {
        load_file(Locator::from_path(dir / "nope.zjsc"));
        FAIL("expected FetchError");
    } catch (const FetchError& e) {
        CHECK(e.kind() == FetchErrorKind::NotFound);
    }
}

TEST_CASE("load_http fetches over the network loader")
{
    // Unreachable port on localhost: a prompt transport failure, never a hang.
    HttpOptions options;
    options.timeout = 500ms;
    CHECK_THROWS_AS(load_http(Locator("http://127.0.0.1:1/x.zjsc"), options), FetchError);
}
