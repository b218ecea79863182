#include <doctest.h>

#include "zjsc/error.hpp"
#include "zjsc/simulator.hpp"

#include "support/oracles.hpp"

using namespace zjsc;

namespace {

struct Fixture {
    test::MemoryLoader files;
    Resolver resolver{files.loader()};
    SimDocument doc{resolver, Locator("/s/index.html")};

    Fixture()
    {
        files.put("/s/hello.zjsc", "<div><span class=\"name\"></span><button>go</button></div>"
                                   "<script>function updateName(n) {}\nfunction onConnected() {}</script>");
        files.put("/s/outer.zjsc", "<section><zjs-component remote-src=\"hello.zjsc\" class=\"a\"></zjs-component>"
                                   "<zjs-component remote-src=\"hello.zjsc\" class=\"b\"></zjs-component></section>"
                                   "<script>function onDisconnected() {}</script>");
        files.put("/s/loop.zjsc", "<zjs-component remote-src=\"loop.zjsc\"></zjs-component>");
    }

    ComponentSpec spec(std::string src, std::vector<Attribute> attrs = {})
    {
        ComponentSpec s;
        s.remote_src = std::move(src);
        s.attributes = std::move(attrs);
        return s;
    }

    std::vector<std::string> lines() const
    {
        std::vector<std::string> out;
        for (const auto& ev : doc.trace())
            out.push_back(describe(ev));
        return out;
    }
};

} // namespace

TEST_CASE("insert fetches, evaluates and connects")
{
    Fixture f;
    const ComponentInstance& hello = f.doc.insert_component(f.doc.root(), f.spec("hello.zjsc"), "hello");
    CHECK(hello.state == LifecycleState::Connected);
    CHECK(hello.profile.methods == std::vector<std::string>{"updateName", "onConnected"});
    CHECK(f.lines()
          == std::vector<std::string>{"FragmentFetched hello hello.zjsc",
                                      "ScriptsEvaluated hello methods:updateName,onConnected",
                                      "Connected hello hook:onConnected"});
    for (std::size_t i = 0; i < f.doc.trace().size(); ++i)
        CHECK(f.doc.trace()[i].seq == i + 1);
}

TEST_CASE("nested components get owner-relative labels and connect first")
{
    Fixture f;
    f.doc.insert_component(f.doc.root(), f.spec("outer.zjsc"), "outer");
    std::vector<std::string> connected;
    for (const auto& ev : f.doc.trace()) {
        if (ev.kind == TraceKind::Connected)
            connected.push_back(ev.label);
    }
    CHECK(connected == std::vector<std::string>{"outer/0", "outer/1", "outer"});
    REQUIRE(f.doc.find_label("outer/1"));

    f.doc.remove_component(f.doc.find_label("outer")->id);
    std::vector<std::string> gone;
    for (const auto& ev : f.doc.trace()) {
        if (ev.kind == TraceKind::Disconnected)
            gone.push_back(ev.label);
    }
    CHECK(gone == std::vector<std::string>{"outer/1", "outer/0", "outer"});
    CHECK(f.doc.live_instances().empty());
    CHECK_THROWS_AS(f.doc.remove_component(1), UnknownInstance);
}

TEST_CASE("the three target forms")
{
    Fixture f;
    NodeId host = f.doc.append_element(f.doc.root(), "main", {{"id", "m"}});
    const ComponentInstance& a = f.doc.insert_component(host, f.spec("hello.zjsc", {{"id", "a"}}), "a");
    const ComponentInstance& b = f.doc.insert_component(host, f.spec("hello.zjsc", {{"class", "b"}}), "b");

    CHECK(f.doc.resolve_target(SelectorTarget{"#a"}).id == a.id);
    CHECK(f.doc.resolve_target(SelectorTarget{"zjs-component"}).id == a.id);
    CHECK(f.doc.resolve_target(SelectorTarget{"main .b"}).id == b.id);
    CHECK(f.doc.resolve_target(InstanceTarget{b.id}).id == b.id);

    const SimNode* button = f.doc.query_selector(".b button");
    REQUIRE(button);
    CHECK(f.doc.resolve_target(ElementTarget{button->id}).id == b.id);
    CHECK(f.doc.resolve_target(ElementTarget{b.node}).id == b.id);

    auto kind_of = [&](const DispatchTarget& t) {
        try {
            f.doc.resolve_target(t);
        } catch (const TargetError& e) {
            return e.kind();
        }
        FAIL("expected TargetError");
        return TargetErrorKind::TargetNotFound;
    };
    CHECK(kind_of(SelectorTarget{"#nobody"}) == TargetErrorKind::TargetNotFound);
    CHECK(kind_of(SelectorTarget{"a > b"}) == TargetErrorKind::TargetNotFound);
    CHECK(kind_of(SelectorTarget{"main"}) == TargetErrorKind::NotAComponent);
    CHECK(kind_of(SelectorTarget{"button"}) == TargetErrorKind::NotAComponent);
    CHECK(kind_of(ElementTarget{host}) == TargetErrorKind::NoAncestorComponent);
    CHECK(kind_of(ElementTarget{f.doc.root()}) == TargetErrorKind::TargetNotFound);
    CHECK(kind_of(ElementTarget{9999}) == TargetErrorKind::TargetNotFound);
    CHECK(kind_of(InstanceTarget{9999}) == TargetErrorKind::TargetNotFound);

    f.doc.remove_component(a.id);
    CHECK(kind_of(SelectorTarget{"#a"}) == TargetErrorKind::TargetNotFound);
}

TEST_CASE("send records one event and never throws")
{
    Fixture f;
    const ComponentInstance& h = f.doc.insert_component(f.doc.root(), f.spec("hello.zjsc"), "h");
    TraceEvent ok = f.doc.send(InstanceTarget{h.id}, "updateName", {"Ann"});
    CHECK(ok.kind == TraceKind::Dispatch);
    CHECK(ok.args == std::vector<std::string>{"Ann"});
    CHECK(describe(ok) == "Dispatch h updateName(Ann)");

    TraceEvent missing = f.doc.send(InstanceTarget{h.id}, "nope");
    CHECK(missing.kind == TraceKind::DispatchError);
    CHECK(missing.detail == "MethodNotFound: nope on h");

    TraceEvent nobody = f.doc.send(SelectorTarget{"#x"}, "m");
    CHECK(nobody.kind == TraceKind::DispatchError);
    CHECK(nobody.instance == no_instance);
    CHECK(nobody.detail.rfind("TargetNotFound", 0) == 0);
}

TEST_CASE("failed loads leave the element in Created and are traced")
{
    Fixture f;
    CHECK_THROWS_AS(f.doc.insert_component(f.doc.root(), f.spec("missing.zjsc"), "m"), FetchError);
    const ComponentInstance* m = f.doc.find_label("m");
    REQUIRE(m);
    CHECK(m->state == LifecycleState::Created);
    TraceEvent ev = f.doc.send(InstanceTarget{m->id}, "x");
    CHECK(ev.detail.rfind("NotConnected", 0) == 0);

    // A cycle below the top level is traced on the nested instance.
    CHECK_NOTHROW(f.doc.insert_component(f.doc.root(), f.spec("loop.zjsc"), "loop"));
    auto lines = f.lines();
    CHECK(std::find(lines.begin(), lines.end(), "DispatchError loop/0 CycleError: loop.zjsc -> loop.zjsc")
          != lines.end());
}

TEST_CASE("changing remote-src starts a new episode; display updates the style")
{
    Fixture f;
    const ComponentInstance& c = f.doc.insert_component(f.doc.root(), f.spec("outer.zjsc"), "c");
    InstanceId id = c.id;
    std::size_t before = f.doc.trace().size();
    f.doc.set_attribute(id, "remote-src", "hello.zjsc");
    std::vector<std::string> all = f.lines();
    std::vector<std::string> tail(all.begin() + static_cast<std::ptrdiff_t>(before), all.end());
    CHECK(tail
          == std::vector<std::string>{"Disconnected c/1", "Disconnected c/0", "FragmentFetched c hello.zjsc",
                                      "ScriptsEvaluated c methods:updateName,onConnected",
                                      "Connected c hook:onConnected"});
    CHECK(f.doc.instance(id)->profile.has_method("updateName"));

    f.doc.set_attribute(id, "display", "block");
    const SimNode* node = f.doc.node(f.doc.instance(id)->node);
    REQUIRE(node->attribute("style"));
    CHECK(*node->attribute("style") == "display:block");
    CHECK(f.doc.query_selector("[style=\"display:block\"]") == node);
}

TEST_CASE("nodes_in_order is a pre-order walk")
{
    Fixture f;
    NodeId a = f.doc.append_element(f.doc.root(), "a");
    NodeId b = f.doc.append_element(a, "b");
    f.doc.append_text(b, "t");
    NodeId c = f.doc.append_element(f.doc.root(), "c");
    auto order = f.doc.nodes_in_order();
    REQUIRE(order.size() == 4);
    CHECK(order[0]->id == a);
    CHECK(order[1]->id == b);
    CHECK(order[2]->kind == NodeKind::Text);
    CHECK(order[3]->id == c);
}
