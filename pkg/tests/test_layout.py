import json
import math
import os
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from citefronts.clustering import FrontInfo, Partition
from citefronts.errors import DataError
from citefronts.graph import CitationGraph
from citefronts.layout import export_graph, layout_force, load_graph_json

from oracles import parse_dot


def make_graph(nodes, edges, years=None):
    return CitationGraph(nodes=tuple(sorted(nodes)), edges=tuple(sorted(edges)),
                         years=years or {})


def test_layout_deterministic():
    g = make_graph("abcdef", [("a", "b"), ("b", "c"), ("c", "d"), ("e", "f")])
    r1 = layout_force(g, seed=7, iterations=40)
    r2 = layout_force(g, seed=7, iterations=40)
    assert r1.coords == r2.coords  # bit-identical
    r3 = layout_force(g, seed=8, iterations=40)
    assert r3.coords != r1.coords


def test_layout_single_node_stays_at_seeded_position():
    g = make_graph(["only"], [])
    r1 = layout_force(g, seed=3, iterations=1)
    r2 = layout_force(g, seed=3, iterations=500)
    assert r1.coords == r2.coords
    x, y = r1.coords["only"]
    assert 0.0 <= x <= 1.0 and 0.0 <= y <= 1.0


def test_layout_empty_graph():
    r = layout_force(make_graph([], []), seed=1, iterations=10)
    assert r.coords == {} and r.iterations_run == 0


def test_layout_two_nodes_converge_to_ideal_length():
    g = make_graph("ab", [("a", "b")])
    k = math.sqrt(1.0 / 2.0)
    for seed in (0, 1, 7):
        r = layout_force(g, seed=seed, iterations=500)
        (x1, y1), (x2, y2) = r.coords["a"], r.coords["b"]
        d = math.hypot(x1 - x2, y1 - y2)
        assert abs(d - k) / k < 0.05


def test_layout_rejects_zero_iterations():
    with pytest.raises(DataError):
        layout_force(make_graph("ab", [("a", "b")]), seed=0, iterations=0)


@st.composite
def small_graph(draw):
    n = draw(st.integers(1, 12))
    nodes = [f"n{i}" for i in range(n)]
    edges = set()
    for _ in range(draw(st.integers(0, 2 * n))):
        i, j = draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1))
        if i != j:
            edges.add((nodes[i], nodes[j]))
    return make_graph(nodes, edges)


@given(small_graph(), st.integers(0, 10_000))
@settings(max_examples=50, deadline=None)
def test_layout_coordinates_always_finite(g, seed):
    r = layout_force(g, seed=seed, iterations=30)
    coords = np.array(list(r.coords.values()), dtype=float)
    assert np.all(np.isfinite(coords))


def test_numpy_fallback_backend(tmp_path):
    """CITEFRONTS_KERNELS=numpy selects the fallback; it must be
    deterministic and land close to the numba result."""
    script = (
        "import json, citefronts\n"
        "from citefronts import _kernels\n"
        "from citefronts.graph import CitationGraph\n"
        "from citefronts.layout import layout_force\n"
        "g = CitationGraph(nodes=('a','b','c','d'), edges=(('a','b'),('b','c'),('c','d')))\n"
        "r = layout_force(g, seed=5, iterations=60)\n"
        "print(json.dumps({'backend': _kernels.BACKEND, 'coords': r.coords}))\n"
    )
    env = dict(os.environ, CITEFRONTS_KERNELS="numpy")
    out1 = subprocess.run([sys.executable, "-c", script], env=env,
                          capture_output=True, text=True, check=True)
    out2 = subprocess.run([sys.executable, "-c", script], env=env,
                          capture_output=True, text=True, check=True)
    got1, got2 = json.loads(out1.stdout), json.loads(out2.stdout)
    assert got1["backend"] == "numpy"
    assert got1 == got2  # deterministic under the fallback too

    g = make_graph("abcd", [("a", "b"), ("b", "c"), ("c", "d")])
    ref = layout_force(g, seed=5, iterations=60)
    for node, (x, y) in ref.coords.items():
        gx, gy = got1["coords"][node]
        assert math.hypot(gx - x, gy - y) < 1e-6


def sample_annotated():
    g = make_graph("ab", [("a", "b")], years={"a": 1990, "b": 1995})
    layout = layout_force(g, seed=1, iterations=5)
    p = Partition(assignment={"a": 1, "b": 2}, q=0.0,
                  fronts={1: FrontInfo(1, 0), 2: FrontInfo(1, 0)})
    return g, layout, p


GRAPHML_NS = "{http://graphml.graphdrawing.org/xmlns}"


def test_graphml_structure():
    g, coords, p = sample_annotated()
    doc = export_graph(g, coords, p, format="graphml")
    root = ET.fromstring(doc)
    assert root.tag == f"{GRAPHML_NS}graphml"
    graph_el = root.find(f"{GRAPHML_NS}graph")
    assert graph_el.get("edgedefault") == "directed"
    nodes = graph_el.findall(f"{GRAPHML_NS}node")
    edges = graph_el.findall(f"{GRAPHML_NS}edge")
    assert len(nodes) == 2 and len(edges) == 1
    assert edges[0].get("source") == "a" and edges[0].get("target") == "b"
    declared_keys = {k.get("id") for k in root.findall(f"{GRAPHML_NS}key")}
    used_keys = {d.get("key") for n in nodes for d in n.findall(f"{GRAPHML_NS}data")}
    assert used_keys <= declared_keys
    front_values = {
        n.get("id"): {d.get("key"): d.text for d in n.findall(f"{GRAPHML_NS}data")}["front"]
        for n in nodes
    }
    assert front_values == {"a": "1", "b": "2"}


def test_graphml_escapes_special_characters():
    g = make_graph(['n"1', "n<2"], [('n"1', "n<2")])
    doc = export_graph(g, format="graphml")
    root = ET.fromstring(doc)  # must stay well-formed
    ids = {n.get("id") for n in root.iter(f"{GRAPHML_NS}node")}
    assert ids == {'n"1', "n<2"}


def test_dot_round_trips_through_reference_parser():
    g, coords, p = sample_annotated()
    doc = export_graph(g, coords, p, format="dot")
    nodes, edges = parse_dot(doc)
    assert nodes == {"a", "b"}
    assert edges == [("a", "b")]


def test_dot_quoting():
    g = make_graph(['weird "uid"'], [])
    nodes, edges = parse_dot(export_graph(g, format="dot"))
    assert nodes == {'weird "uid"'}


def test_json_export_round_trip():
    g, coords, p = sample_annotated()
    doc = export_graph(g, coords, p, format="json")
    obj = json.loads(doc)
    assert obj["directed"] is True
    assert [n["id"] for n in obj["nodes"]] == ["a", "b"]
    assert obj["nodes"][0]["front"] == "1" and obj["nodes"][0]["year"] == 1990
    assert {"x", "y"} <= set(obj["nodes"][0])
    back = load_graph_json(doc)
    assert back.nodes == g.nodes and back.edges == g.edges and back.years == g.years


def test_export_unknown_format():
    g, _, _ = sample_annotated()
    with pytest.raises(DataError, match="format"):
        export_graph(g, format="gexf")


def test_export_requires_cover():
    g, coords, p = sample_annotated()
    bigger = make_graph("abc", [("a", "b")], years={})
    with pytest.raises(DataError, match="cover"):
        export_graph(bigger, coords=coords, format="json")
    with pytest.raises(DataError, match="cover"):
        export_graph(bigger, p=p, format="json")
