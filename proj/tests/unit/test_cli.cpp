#include <doctest.h>

#include "zjsc/cli.hpp"

#include "support/paths.hpp"

#include <sstream>

using namespace zjsc;

namespace {

std::filesystem::path fx(const std::string& rel)
{
    return test::fixtures_dir() / rel;
}

} // namespace

TEST_CASE("validate reports findings with positions and a summary")
{
    std::ostringstream out, err;
    int code = cmd_validate({fx("site/component/counter.zjsc"), fx("broken/unterminated.zjsc"),
                             fx("broken/no-remote-src.html")},
                            false, out, err);
    CHECK(code == exit_domain);
    std::string text = out.str();
    CHECK(text.find("counter.zjsc: ok methods: [render, increment, reset, onConnected, onDisconnected]")
          != std::string::npos);
    CHECK(text.find("unterminated.zjsc:4:13: error UnterminatedString") != std::string::npos);
    CHECK(text.find("warning MissingRemoteSrc") != std::string::npos);
    CHECK(text.find("3 file(s), 1 error(s), 1 warning(s)") != std::string::npos);
}

TEST_CASE("validate: warnings pass unless strict; unreadable paths are environment errors")
{
    std::ostringstream out, err;
    CHECK(cmd_validate({fx("broken/no-remote-src.html")}, false, out, err) == exit_ok);
    CHECK(cmd_validate({fx("broken/no-remote-src.html")}, true, out, err) == exit_domain);
    CHECK(cmd_validate({fx("nope/missing.html")}, false, out, err) == exit_environment);
    CHECK(cmd_validate({fx("broken/latin1.html")}, false, out, err) == exit_domain);
}

TEST_CASE("flatten writes the page and reports cycles relative to the entry")
{
    test::TempDir dir("cli");
    std::ostringstream out, err;
    CHECK(cmd_flatten(fx("site/index.html").string(), dir / "out.html", {}, out, err) == exit_ok);
    std::string html = test::read_file(dir / "out.html");
    CHECK(html.find("<h1>Welcome</h1>") != std::string::npos);
    CHECK(html.find("data-zjs-from=\"component/hello.zjsc\"") != std::string::npos);
    CHECK(html.find(test::fixtures_dir().string()) == std::string::npos);
    CHECK(out.str().rfind("wrote ", 0) == 0);

    std::ostringstream out2, err2;
    CHECK(cmd_flatten(fx("cyclic/a.zjsc").string(), dir / "c.html", {}, out2, err2) == exit_domain);
    CHECK(err2.str() == "error: include cycle: a.zjsc -> b.zjsc -> a.zjsc\n");

    std::ostringstream out3, err3;
    CHECK(cmd_flatten(fx("site/index.html").string(), dir / "no/such/dir/x.html", {}, out3, err3)
          == exit_environment);
    CHECK(cmd_flatten(fx("broken/missing-include.html").string(), dir / "m.html", {}, out3, err3) == exit_domain);
}

TEST_CASE("graph in both formats")
{
    std::ostringstream edges, err;
    CHECK(cmd_graph(fx("cyclic/a.zjsc").string(), GraphFormat::Edges, edges, err) == exit_ok);
    CHECK(edges.str()
          == "# nodes: 2, edges: 2\na.zjsc -> b.zjsc\nb.zjsc -> a.zjsc\n# cycle: a.zjsc -> b.zjsc -> a.zjsc\n");
    std::ostringstream dot;
    CHECK(cmd_graph(fx("diamond/top.html").string(), GraphFormat::Dot, dot, err) == exit_ok);
    CHECK(dot.str().find("\"top.html\" -> \"left.zjsc\"") != std::string::npos);
    std::ostringstream missing;
    CHECK(cmd_graph(fx("nope.html").string(), GraphFormat::Edges, missing, err) == exit_domain);
}

TEST_CASE("simulate prints PASS or a diff")
{
    std::ostringstream out, err;
    CHECK(cmd_simulate(fx("scenarios/04-send-update-name.json"), out, err) == exit_ok);
    CHECK(out.str().rfind("PASS ", 0) == 0);

    test::TempDir dir("sim");
    test::write_file(dir / "bad.json", R"({"name": "wrong", "fixtures_root": ")" + fx("site").string()
                                           + R"(", "steps": [], "expect": [{"kind": "Connected"}]})");
    std::ostringstream fail_out, fail_err;
    CHECK(cmd_simulate(dir / "bad.json", fail_out, fail_err) == exit_domain);
    CHECK(fail_out.str().rfind("FAIL wrong\n--- expected\n+++ actual\n", 0) == 0);

    std::ostringstream o, e;
    CHECK(cmd_simulate(dir / "absent.json", o, e) == exit_environment);
}

TEST_CASE("entry locators")
{
    CHECK(entry_locator("https://Example.com/a/./b.html").str() == "https://example.com/a/b.html");
    CHECK(entry_locator("/x/../y.html").str() == "/y.html");
}
