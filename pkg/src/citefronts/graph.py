"""Directed citation graph: components, degrees, core extraction, quotients.

Graphs are immutable after construction: nodes and edges are stored in
sorted order so every downstream result is deterministic regardless of
how the input corpus was ordered.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field

from .errors import DataError
from .records import Corpus

NOISE = "NOISE"


@dataclass
class CitationGraph:
    """Directed graph, edge = (citing_uid, cited_uid)."""

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    years: dict[str, int | None] = field(default_factory=dict)

    def __post_init__(self):
        node_set = set(self.nodes)
        for u, v in self.edges:
            if u == v:
                raise DataError(f"self-loop on {u!r}")
            if u not in node_set or v not in node_set:
                raise DataError(f"edge ({u!r}, {v!r}) has endpoint outside node set")
        if len(set(self.edges)) != len(self.edges):
            raise DataError("duplicate edges")

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def indegrees(self) -> dict[str, int]:
        deg = dict.fromkeys(self.nodes, 0)
        for _, v in self.edges:
            deg[v] += 1
        return deg


@dataclass
class DegreeHistogram:
    """Degree -> node count; zero-count degrees are never stored."""

    bins: dict[int, int]
    n_nodes: int


@dataclass
class QuotientGraph:
    """Front-level aggregation of a partitioned graph.

    ``weighted_edges`` holds every inter-front pair with its full
    inter-citation count (direction ignored), so weight conservation
    against the source graph always holds; ``retained`` marks the subset
    that survives the display rule (weight >= min_weight, or a front's
    single largest edge as fallback).
    """

    front_nodes: tuple
    weighted_edges: dict[tuple, int]
    intra_weights: dict
    retained: set
    excluded_noise_nodes: int = 0


def build_graph(corpus: Corpus) -> CitationGraph:
    nodes = tuple(sorted(r.uid for r in corpus.records))
    edges = tuple(sorted(corpus.links))
    years = {r.uid: r.year for r in corpus.records}
    return CitationGraph(nodes=nodes, edges=edges, years=years)


def _undirected_adjacency(graph: CitationGraph) -> dict[str, list[str]]:
    adj: dict[str, list[str]] = {u: [] for u in graph.nodes}
    for u, v in graph.edges:
        adj[u].append(v)
        adj[v].append(u)
    return adj


def weakly_connected_components(graph: CitationGraph) -> list[list[str]]:
    """All weakly connected components, each sorted, largest first
    (ties broken by smallest minimum uid)."""
    adj = _undirected_adjacency(graph)
    seen: set[str] = set()
    components: list[list[str]] = []
    for start in graph.nodes:
        if start in seen:
            continue
        comp = []
        queue = deque([start])
        seen.add(start)
        while queue:
            u = queue.popleft()
            comp.append(u)
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        components.append(sorted(comp))
    components.sort(key=lambda c: (-len(c), c[0]))
    return components


def largest_component(graph: CitationGraph) -> tuple[CitationGraph, list[int]]:
    """Induced subgraph on the largest weakly connected component.

    Also returns the full component-size multiset (descending).
    """
    if not graph.nodes:
        return graph, []
    components = weakly_connected_components(graph)
    sizes = sorted((len(c) for c in components), reverse=True)
    keep = set(components[0])
    return induced_subgraph(graph, keep), sizes


def induced_subgraph(graph: CitationGraph, keep: set[str]) -> CitationGraph:
    nodes = tuple(u for u in graph.nodes if u in keep)
    edges = tuple((u, v) for u, v in graph.edges if u in keep and v in keep)
    years = {u: graph.years.get(u) for u in nodes}
    return CitationGraph(nodes=nodes, edges=edges, years=years)


def indegree_histogram(graph: CitationGraph) -> DegreeHistogram:
    counts = Counter(graph.indegrees().values())
    return DegreeHistogram(bins=dict(sorted(counts.items())), n_nodes=graph.n_nodes)


def extract_core(graph: CitationGraph, k_min: int) -> CitationGraph:
    """Nodes whose full-graph indegree is >= k_min, with induced edges.

    Single pass: the threshold is applied once against the input graph's
    indegrees, never re-applied to the shrunken core.
    """
    if k_min < 0:
        raise DataError("k_min must be >= 0")
    deg = graph.indegrees()
    return induced_subgraph(graph, {u for u, d in deg.items() if d >= k_min})


def quotient(
    graph: CitationGraph,
    partition,
    min_weight: int,
    keep_max_per_front: bool = True,
) -> QuotientGraph:
    """Aggregate the graph to front level.

    ``partition`` (a Partition or a plain node->front mapping) must cover
    every graph node; edges touching a NOISE node are excluded from both
    the inter- and intra-front sums.  Direction is ignored for weights.
    """
    assignment = getattr(partition, "assignment", partition)
    unknown = [u for u in assignment if u not in set(graph.nodes)]
    if unknown:
        raise DataError(f"partition references unknown nodes: {sorted(unknown)[:5]}")
    missing = [u for u in graph.nodes if u not in assignment]
    if missing:
        raise DataError(f"partition does not cover nodes: {missing[:5]}")

    noise_nodes = {u for u, f in assignment.items() if f == NOISE}
    fronts = sorted({f for f in assignment.values() if f != NOISE}, key=str)

    weights: dict[tuple, int] = {}
    intra: dict = {f: 0 for f in fronts}
    for u, v in graph.edges:
        fu, fv = assignment[u], assignment[v]
        if fu == NOISE or fv == NOISE:
            continue
        if fu == fv:
            intra[fu] += 1
        else:
            pair = (fu, fv) if str(fu) <= str(fv) else (fv, fu)
            weights[pair] = weights.get(pair, 0) + 1

    retained = {pair for pair, w in weights.items() if w >= min_weight}
    if keep_max_per_front:
        for f in fronts:
            incident = [(pair, w) for pair, w in weights.items() if f in pair]
            if incident and not any(pair in retained for pair, _ in incident):
                # largest interaction wins; ties go to the smallest pair id
                best_w = max(w for _, w in incident)
                best_pair = min(
                    (pair for pair, w in incident if w == best_w),
                    key=lambda pair: (str(pair[0]), str(pair[1])),
                )
                retained.add(best_pair)

    return QuotientGraph(
        front_nodes=tuple(fronts),
        weighted_edges=dict(sorted(weights.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1])))),
        intra_weights=intra,
        retained=retained,
        excluded_noise_nodes=len(noise_nodes),
    )


def stats_report(graph: CitationGraph, corpus: Corpus | None = None) -> str:
    """Plain-text node/edge/component summary."""
    components = weakly_connected_components(graph) if graph.nodes else []
    sizes = sorted((len(c) for c in components), reverse=True)
    lines = [
        f"nodes: {graph.n_nodes}",
        f"edges: {graph.n_edges}",
        f"components: {len(sizes)}",
        f"largest_component: {sizes[0] if sizes else 0}",
        "component_sizes: " + ",".join(map(str, sizes[:50])) + ("..." if len(sizes) > 50 else ""),
    ]
    if corpus is not None:
        lines += [
            f"records: {len(corpus.records)}",
            f"resolved_refs: {corpus.resolved_ref_count}",
            f"unresolved_refs: {corpus.unresolved_count}",
            f"self_citations: {corpus.self_citation_count}",
        ]
    return "\n".join(lines) + "\n"


def histogram_csv(hist: DegreeHistogram) -> str:
    lines = ["degree,count"]
    lines += [f"{d},{c}" for d, c in sorted(hist.bins.items())]
    return "\n".join(lines) + "\n"
