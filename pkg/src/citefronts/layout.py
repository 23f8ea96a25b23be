"""Deterministic force-directed layout and graph serialization.

The layout is a Fruchterman-Reingold spring-electrical model: nodes
repel with k^2/d, edges attract with d^2/k (k = sqrt(area/n) with unit
area), and per-iteration displacement is capped by a linearly cooling
temperature.  Initial positions come from a seeded uniform draw over
the unit square, so a (graph, seed, iterations) triple always produces
identical coordinates.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from . import _kernels
from .clustering import Partition
from .errors import DataError
from .graph import CitationGraph

T0_FRACTION = 0.1  # initial temperature, as a fraction of the unit frame


@dataclass
class LayoutResult:
    coords: dict[str, tuple[float, float]]
    iterations_run: int
    seed: int


def layout_force(graph: CitationGraph, seed: int = 42, iterations: int = 100) -> LayoutResult:
    if iterations < 1:
        raise DataError("iterations must be >= 1")
    n = graph.n_nodes
    if n == 0:
        return LayoutResult(coords={}, iterations_run=0, seed=seed)

    rng = np.random.default_rng(seed)
    pos = rng.random((n, 2))
    index = {u: i for i, u in enumerate(graph.nodes)}
    undirected = {(index[u], index[v]) if index[u] < index[v] else (index[v], index[u])
                  for u, v in graph.edges}
    edges = np.array(sorted(undirected), dtype=np.int64).reshape(-1, 2)

    k = math.sqrt(1.0 / n)
    t0 = T0_FRACTION
    for it in range(iterations):
        t = t0 * (1.0 - it / iterations)
        disp = _kernels.fr_displacements(pos, edges, k)
        length = np.sqrt(np.sum(disp * disp, axis=1))
        scale = np.where(length > 0.0, np.minimum(length, t) / np.maximum(length, 1e-30), 0.0)
        pos = pos + disp * scale[:, None]

    coords = {u: (float(pos[i, 0]), float(pos[i, 1])) for u, i in index.items()}
    return LayoutResult(coords=coords, iterations_run=iterations, seed=seed)


def _check_cover(graph: CitationGraph, mapping, what: str):
    missing = [u for u in graph.nodes if u not in mapping]
    if missing:
        raise DataError(f"{what} does not cover nodes: {missing[:5]}")


def export_graph(
    graph: CitationGraph,
    coords: LayoutResult | None = None,
    p: Partition | None = None,
    format: str = "graphml",
) -> str:
    """Serialize the graph (with optional coordinates and front labels)
    as GraphML 1.0, Graphviz DOT, or a flat JSON document."""
    if coords is not None:
        _check_cover(graph, coords.coords, "layout")
    if p is not None:
        _check_cover(graph, p.assignment, "partition")
    if format == "graphml":
        return _to_graphml(graph, coords, p)
    if format == "dot":
        return _to_dot(graph, coords, p)
    if format == "json":
        return _to_json(graph, coords, p)
    raise DataError(f"unknown export format: {format!r}")


def _node_attrs(graph, coords, p, uid):
    attrs = {}
    year = graph.years.get(uid)
    if year is not None:
        attrs["year"] = year
    if p is not None:
        attrs["front"] = str(p.assignment[uid])
    if coords is not None:
        x, y = coords.coords[uid]
        attrs["x"] = x
        attrs["y"] = y
    return attrs


_GRAPHML_KEYS = [
    ("year", "int"),
    ("front", "string"),
    ("x", "double"),
    ("y", "double"),
]


def _to_graphml(graph, coords, p) -> str:
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns"',
        '         xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance"',
        '         xsi:schemaLocation="http://graphml.graphdrawing.org/xmlns'
        ' http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd">',
    ]
    for name, typ in _GRAPHML_KEYS:
        out.append(f'  <key id="{name}" for="node" attr.name="{name}" attr.type="{typ}"/>')
    out.append('  <graph id="G" edgedefault="directed">')
    for uid in graph.nodes:
        attrs = _node_attrs(graph, coords, p, uid)
        if attrs:
            out.append(f"    <node id={quoteattr(uid)}>")
            for name, _ in _GRAPHML_KEYS:
                if name in attrs:
                    out.append(f'      <data key="{name}">{escape(str(attrs[name]))}</data>')
            out.append("    </node>")
        else:
            out.append(f"    <node id={quoteattr(uid)}/>")
    for u, v in graph.edges:
        out.append(f"    <edge source={quoteattr(u)} target={quoteattr(v)}/>")
    out.append("  </graph>")
    out.append("</graphml>")
    return "\n".join(out) + "\n"


def _dot_quote(s: str) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _to_dot(graph, coords, p) -> str:
    out = ["digraph citations {"]
    for uid in graph.nodes:
        attrs = _node_attrs(graph, coords, p, uid)
        parts = []
        if "year" in attrs:
            parts.append(f"year={attrs['year']}")
        if "front" in attrs:
            parts.append(f"front={_dot_quote(attrs['front'])}")
        if "x" in attrs:
            parts.append(f'pos="{attrs["x"]!r},{attrs["y"]!r}"')
        attr_text = f" [{', '.join(parts)}]" if parts else ""
        out.append(f"  {_dot_quote(uid)}{attr_text};")
    for u, v in graph.edges:
        out.append(f"  {_dot_quote(u)} -> {_dot_quote(v)};")
    out.append("}")
    return "\n".join(out) + "\n"


def _to_json(graph, coords, p) -> str:
    nodes = []
    for uid in graph.nodes:
        node = {"id": uid}
        node.update(_node_attrs(graph, coords, p, uid))
        nodes.append(node)
    obj = {
        "directed": True,
        "nodes": nodes,
        "edges": [{"source": u, "target": v} for u, v in graph.edges],
    }
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def load_graph_json(text: str) -> CitationGraph:
    """Rebuild a CitationGraph from the JSON export format."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"bad graph JSON: {exc}") from exc
    nodes = tuple(sorted(n["id"] for n in obj["nodes"]))
    years = {n["id"]: n.get("year") for n in obj["nodes"]}
    edges = tuple(sorted((e["source"], e["target"]) for e in obj["edges"]))
    return CitationGraph(nodes=nodes, edges=edges, years=years)
