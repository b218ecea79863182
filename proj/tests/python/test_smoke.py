import random
import threading
import time
from html.parser import HTMLParser

import pytest

import zjsc


def test_module_surface():
    for name in ("parse_fragment", "normalize", "component_specs", "scan_script", "method_table",
                 "canonicalize", "Resolver", "flatten", "build_graph", "format_graph", "detect_cycles",
                 "run_scenario", "ZjscError", "CycleError", "FetchError", "EncodingError"):
        assert hasattr(zjsc, name), name
    assert issubclass(zjsc.CycleError, zjsc.ZjscError)


def test_parse_and_normalize():
    doc = zjsc.parse_fragment("<DIV class=a>x &amp; y<br></div>")
    (div,) = doc["nodes"]
    assert div["name"] == "div"
    assert div["attributes"] == [("class", "a")]
    assert [c["kind"] for c in div["children"]] == ["text", "element"]
    assert zjsc.normalize("<p>a<br>b") == "<p>a<br>b</p>"
    with pytest.raises(zjsc.EncodingError):
        zjsc.parse_fragment(b"caf\xe9")


def test_component_specs_and_methods():
    specs = zjsc.component_specs('<zjs-component remote-src="h.zjsc" display="inline" name="Bob"></zjs-component>')
    assert specs == [{"remote_src": "h.zjsc", "attributes": [("name", "Bob")], "display": "inline", "path": [0]}]
    table = zjsc.method_table("<script>function a() {}\nfunction onConnected() {}</script>")
    assert table["methods"] == ["a", "onConnected"]
    assert table["has_on_connected"]


def test_flatten_site(fixtures):
    html = zjsc.flatten(str(fixtures / "site" / "index.html"))
    assert "<h1>Welcome</h1>" in html
    assert 'data-zjs-from="component/hello.zjsc"' in html
    assert str(fixtures) not in html
    bare = zjsc.flatten(str(fixtures / "site" / "index.html"), keep_scripts=False, keep_markers=False)
    assert "<script>function" not in bare and "data-zjs-from" not in bare


def test_flatten_cycle(fixtures):
    with pytest.raises(zjsc.CycleError, match="a.zjsc -> .*b.zjsc -> .*a.zjsc"):
        zjsc.flatten(str(fixtures / "cyclic" / "a.zjsc"))


def test_graph_and_dot(fixtures):
    pydot = pytest.importorskip("pydot")
    graph = zjsc.build_graph(str(fixtures / "cyclic" / "a.zjsc"))
    assert len(graph["nodes"]) == 2 and len(graph["cycles"]) == 1
    (parsed,) = pydot.graph_from_dot_data(zjsc.format_graph(str(fixtures / "diamond" / "top.html"), "dot"))
    edges = {(e.get_source().strip('"'), e.get_destination().strip('"')) for e in parsed.get_edges()}
    assert edges == {("top.html", "left.zjsc"), ("top.html", "right.zjsc"),
                     ("left.zjsc", "bottom.zjsc"), ("right.zjsc", "bottom.zjsc")}


def test_detect_cycles_against_brute_force():
    rng = random.Random(5)
    for _ in range(100):
        n = rng.randint(1, 7)
        edges = [(f"/v{a}", f"/v{b}") for a in range(n) for b in range(n) if rng.random() < 0.3]
        got = zjsc.detect_cycles(edges, ["/v0"])
        succ = {}
        for a, b in edges:
            succ.setdefault(a, set()).add(b)
        reach, todo = {"/v0"}, ["/v0"]
        while todo:
            for w in succ.get(todo.pop(), ()):
                if w not in reach:
                    reach.add(w)
                    todo.append(w)
        want = set()

        def extend(start, path):
            for w in succ.get(path[-1], ()):
                if w == start:
                    k = path.index(min(path))
                    want.add(tuple(path[k:] + path[:k]))
                elif w not in path:
                    extend(start, path + [w])

        for s in reach:
            extend(s, [s])
        assert [tuple(c) for c in got] == sorted(want)


def test_scenarios(fixtures):
    for path in sorted((fixtures / "scenarios").rglob("*.json")):
        result = zjsc.run_scenario(str(path))
        assert result["passed"], (path, result["diff"])
        assert [e["seq"] for e in result["trace"]] == list(range(1, len(result["trace"]) + 1))


def test_resolver_with_python_loader_single_flight():
    calls = []

    def loader(locator):
        calls.append(locator)
        time.sleep(0.05)
        return "<p>" + locator + "</p>"

    resolver = zjsc.Resolver(loader)
    results = []
    threads = [threading.Thread(target=lambda: results.append(resolver.resolve("/m/a.zjsc"))) for _ in range(16)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert results == ["<p>/m/a.zjsc</p>"] * 16
    assert calls == ["/m/a.zjsc"]
    stats = resolver.stats()
    assert stats["loads"] == 1 and stats["requests"] == 16
    assert stats["requests"] == stats["loads"] + stats["cache_hits"] + stats["coalesced"]
    assert resolver.invalidate("/m/a.zjsc")
    with pytest.raises(zjsc.FetchError):
        zjsc.Resolver(lambda loc: None).resolve("/m/none")


def test_canonicalize():
    assert zjsc.canonicalize("http://a/b/c/d;p?q", "../g") == "http://a/b/g"
    with pytest.raises(zjsc.LocatorError):
        zjsc.canonicalize("/srv/p.html", "../x", sandbox_root="/srv")


class _Collector(HTMLParser):
    """Start tags, attributes and raw script text as html.parser sees them."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.tags = []
        self.scripts = []
        self._in_script = False

    def handle_starttag(self, tag, attrs):
        seen = {}
        for name, value in attrs:
            seen.setdefault(name, value or "")
        self.tags.append((tag, sorted(seen.items())))
        if tag == "script":
            self._in_script = True
            self.scripts.append("")

    def handle_startendtag(self, tag, attrs):
        self.handle_starttag(tag, attrs)
        self._in_script = False

    def handle_endtag(self, tag):
        if tag == "script":
            self._in_script = False

    def handle_data(self, data):
        if self._in_script:
            self.scripts[-1] += data


def _ours(nodes, tags, scripts):
    for n in nodes:
        if n["kind"] != "element":
            continue
        tags.append((n["name"], sorted(n["attributes"])))
        if n["name"] == "script":
            scripts.append("".join(c["data"] for c in n["children"]))
        else:
            _ours(n["children"], tags, scripts)


def _random_page(rng):
    words = ["hello", "a &amp; b", "x < y", "café", "1 > 0"]
    tags = ["div", "p", "span", "section", "b", "zjs-component"]
    names = ["id", "class", "title", "data-x", "remote-src"]
    out = []
    for _ in range(rng.randint(1, 12)):
        r = rng.random()
        if r < 0.5:
            tag = rng.choice(tags)
            attrs = "".join(
                f' {rng.choice(names)}="{rng.choice(words).replace(chr(34), "")}"' for _ in range(rng.randint(0, 3)))
            out.append(f"<{tag}{attrs}>{rng.choice(words)}</{tag}>")
        elif r < 0.7:
            body = rng.choice(["if (a < b) {}", "x = '<p>'", "function f() {}", "a && b", "</div>"])
            out.append(f"<script>{body}</script>")
        elif r < 0.8:
            out.append(rng.choice(["<br>", '<img src="x.png">', "<hr/>", '<input value="v">']))
        else:
            out.append(rng.choice(words))
    return "".join(out)


def test_parser_agrees_with_html_parser():
    rng = random.Random(2024)
    for _ in range(200):
        page = _random_page(rng)
        ref = _Collector()
        ref.feed(page)
        ref.close()
        tags, scripts = [], []
        _ours(zjsc.parse_fragment(page)["nodes"], tags, scripts)
        assert tags == ref.tags, page
        assert scripts == ref.scripts, page
