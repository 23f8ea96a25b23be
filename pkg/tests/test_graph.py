import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from citefronts.errors import DataError
from citefronts.graph import (
    NOISE,
    CitationGraph,
    build_graph,
    extract_core,
    indegree_histogram,
    largest_component,
    quotient,
    weakly_connected_components,
)
from citefronts.records import Corpus, RawRecord


def make_graph(nodes, edges, years=None):
    return CitationGraph(nodes=tuple(sorted(nodes)), edges=tuple(sorted(edges)),
                         years=years or {})


def corpus_of(uids, links):
    return Corpus(records=[RawRecord(uid=u) for u in uids], links=sorted(links))


def test_build_graph_basic():
    g = build_graph(corpus_of(["A", "B", "C"], [("B", "A"), ("C", "A")]))
    assert g.n_nodes == 3 and g.n_edges == 2
    assert g.edges == (("B", "A"), ("C", "A"))


def test_build_graph_empty():
    g = build_graph(corpus_of([], []))
    assert g.n_nodes == 0 and g.n_edges == 0


def test_build_graph_preserves_link_count():
    links = [("B", "A"), ("C", "A"), ("C", "B")]
    g = build_graph(corpus_of(["A", "B", "C"], links))
    assert g.n_edges == len(links)


def test_graph_rejects_self_loop_and_duplicates():
    with pytest.raises(DataError):
        make_graph(["A"], [("A", "A")])
    with pytest.raises(DataError):
        CitationGraph(nodes=("A", "B"), edges=(("A", "B"), ("A", "B")))
    with pytest.raises(DataError):
        make_graph(["A"], [("A", "B")])


def test_largest_component_picks_biggest():
    g = make_graph("abcde", [("a", "b"), ("b", "c"), ("d", "e")])
    sub, sizes = largest_component(g)
    assert sorted(sub.nodes) == ["a", "b", "c"]
    assert sizes == [3, 2]


def test_largest_component_tie_breaks_by_min_uid():
    g = make_graph("abcd", [("c", "d"), ("a", "b")])
    sub, sizes = largest_component(g)
    assert sorted(sub.nodes) == ["a", "b"]
    assert sizes == [2, 2]


def test_largest_component_connected_identity():
    g = make_graph("abc", [("a", "b"), ("b", "c")])
    sub, sizes = largest_component(g)
    assert sub.nodes == g.nodes and sub.edges == g.edges and sizes == [3]


def test_largest_component_empty():
    sub, sizes = largest_component(make_graph([], []))
    assert sub.n_nodes == 0 and sizes == []


def test_indegree_histogram_star():
    g = make_graph("abcdz", [("a", "z"), ("b", "z"), ("c", "z"), ("d", "z")])
    hist = indegree_histogram(g)
    assert hist.bins == {0: 4, 4: 1} and hist.n_nodes == 5


def test_indegree_histogram_chain():
    hist = indegree_histogram(make_graph("abc", [("a", "b"), ("b", "c")]))
    assert hist.bins == {0: 1, 1: 2}


def test_indegree_histogram_empty():
    hist = indegree_histogram(make_graph([], []))
    assert hist.bins == {} and hist.n_nodes == 0


def test_extract_core_identity_at_zero():
    g = make_graph("abc", [("a", "b"), ("b", "c")])
    core = extract_core(g, 0)
    assert core.nodes == g.nodes and core.edges == g.edges


def test_extract_core_star():
    g = make_graph("abcdz", [("a", "z"), ("b", "z"), ("c", "z"), ("d", "z")])
    core = extract_core(g, 1)
    assert core.nodes == ("z",) and core.edges == ()


def test_extract_core_single_pass():
    # chain a->b->c: b and c have indegree 1; the induced subgraph {b, c}
    # keeps the b->c edge even though b's indegree inside the core is 0
    g = make_graph("abc", [("a", "b"), ("b", "c")])
    core = extract_core(g, 1)
    assert core.nodes == ("b", "c") and core.edges == (("b", "c"),)


def graph_strategy(max_nodes=10):
    @st.composite
    def build(draw):
        n = draw(st.integers(0, max_nodes))
        nodes = [f"n{i:02d}" for i in range(n)]
        edges = set()
        if n >= 2:
            for _ in range(draw(st.integers(0, 2 * n))):
                i = draw(st.integers(0, n - 1))
                j = draw(st.integers(0, n - 1))
                if i != j:
                    edges.add((nodes[i], nodes[j]))
        return make_graph(nodes, edges)
    return build()


@given(graph_strategy())
@settings(max_examples=100, deadline=None)
def test_components_partition_node_set(g):
    comps = weakly_connected_components(g)
    seen = [u for comp in comps for u in comp]
    assert sorted(seen) == sorted(g.nodes)
    assert len(seen) == len(set(seen))


@given(graph_strategy())
@settings(max_examples=100, deadline=None)
def test_histogram_conservation(g):
    hist = indegree_histogram(g)
    assert sum(hist.bins.values()) == g.n_nodes
    assert sum(d * c for d, c in hist.bins.items()) == g.n_edges
    assert all(c >= 1 for c in hist.bins.values())


@given(graph_strategy(), st.integers(0, 5), st.integers(0, 5))
@settings(max_examples=100, deadline=None)
def test_extract_core_monotonic(g, k1, k2):
    lo, hi = min(k1, k2), max(k1, k2)
    assert set(extract_core(g, hi).nodes) <= set(extract_core(g, lo).nodes)


def test_quotient_retains_heavy_edge():
    g = make_graph("abcdef", [("a", "d"), ("b", "e"), ("c", "f")])
    assignment = {"a": 1, "b": 1, "c": 1, "d": 2, "e": 2, "f": 2}
    q = quotient(g, assignment, min_weight=2)
    assert q.weighted_edges == {(1, 2): 3}
    assert q.retained == {(1, 2)}
    assert q.intra_weights == {1: 0, 2: 0}


def test_quotient_fallback_keeps_largest():
    g = make_graph("abcd", [("a", "c")])
    assignment = {"a": 1, "b": 1, "c": 2, "d": 2}
    q = quotient(g, assignment, min_weight=5, keep_max_per_front=True)
    assert q.retained == {(1, 2)}
    q2 = quotient(g, assignment, min_weight=5, keep_max_per_front=False)
    assert q2.retained == set()
    assert q2.weighted_edges == {(1, 2): 1}


def test_quotient_all_intra():
    g = make_graph("abcd", [("a", "b"), ("b", "c"), ("c", "d")])
    assignment = dict.fromkeys("abcd", 1)
    q = quotient(g, assignment, min_weight=1)
    assert q.weighted_edges == {}
    assert sum(q.intra_weights.values()) == g.n_edges


def test_quotient_excludes_noise():
    g = make_graph("abcd", [("a", "b"), ("c", "d"), ("a", "c")])
    assignment = {"a": 1, "b": 1, "c": 2, "d": NOISE}
    q = quotient(g, assignment, min_weight=1)
    assert q.excluded_noise_nodes == 1
    # c->d edge touches noise: excluded from both sums
    assert q.intra_weights == {1: 1, 2: 0}
    assert q.weighted_edges == {(1, 2): 1}


def test_quotient_unknown_and_missing_nodes_error():
    g = make_graph("ab", [("a", "b")])
    with pytest.raises(DataError, match="unknown"):
        quotient(g, {"a": 1, "b": 1, "zz": 2}, min_weight=1)
    with pytest.raises(DataError, match="cover"):
        quotient(g, {"a": 1}, min_weight=1)


@given(graph_strategy(), st.integers(1, 4), st.data())
@settings(max_examples=100, deadline=None)
def test_quotient_weight_conservation(g, n_fronts, data):
    labels = [data.draw(st.integers(1, n_fronts), label=f"front[{u}]") for u in g.nodes]
    assignment = dict(zip(g.nodes, labels))
    q = quotient(g, assignment, min_weight=0)
    assert sum(q.weighted_edges.values()) + sum(q.intra_weights.values()) == g.n_edges
    # min_weight 0 retains every inter-front pair
    assert q.retained == set(q.weighted_edges)
