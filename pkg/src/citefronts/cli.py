"""Command-line interface: one subcommand per pipeline stage plus a
one-shot ``run`` that reproduces every artifact from a config file.

Exit codes: 0 success, 2 usage error, 3 data error, 4 stage failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import clustering, dynamics, graph, layout, powerlaw, records, synth, terms
from .errors import CiteFrontsError, DataError, ParseError, StageError


@dataclass
class PipelineConfig:
    input: str = ""
    format: str = "lines"
    out_dir: str = "out"
    k_min: int | None = None
    min_internal_edges: int = 100
    quotient_min_weight: int = 500
    quotient_keep_max: bool = True
    periods: str = ""
    term_top_k: int = 10
    top_cited_n: int = 5
    term_statistic: str = "llr"
    stopwords: str = ""
    layout_seed: int = 42
    layout_iterations: int = 100
    threads: int = 1

    def validate(self):
        if not self.input:
            raise DataError("config: 'input' is required")
        if self.format not in ("lines", "tagged"):
            raise DataError(f"config: unknown format {self.format!r}")
        if self.k_min is None:
            raise DataError("config: 'k_min' is required (no paper-fixed default exists)")
        for name, minimum in (
            ("k_min", 0), ("min_internal_edges", 0), ("quotient_min_weight", 0),
            ("term_top_k", 1), ("top_cited_n", 1), ("layout_iterations", 1), ("threads", 1),
        ):
            if getattr(self, name) < minimum:
                raise DataError(f"config: {name} must be >= {minimum}")
        parse_periods(self.periods)


_BOOL_VALUES = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def _coerce(name: str, value: str, target_type):
    if target_type is bool:
        try:
            return _BOOL_VALUES[value.strip().lower()]
        except KeyError:
            raise DataError(f"config: bad boolean for {name}: {value!r}")
    if target_type is int:
        try:
            return int(value)
        except ValueError:
            raise DataError(f"config: bad integer for {name}: {value!r}")
    return value


_CONFIG_TYPES = {
    "input": str, "format": str, "out_dir": str, "k_min": int,
    "min_internal_edges": int, "quotient_min_weight": int, "quotient_keep_max": bool,
    "periods": str, "term_top_k": int, "top_cited_n": int, "term_statistic": str,
    "stopwords": str, "layout_seed": int, "layout_iterations": int, "threads": int,
}


def load_config(path: str) -> dict:
    """Flat key=value config file; '#' starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_TYPES:
            raise DataError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = _coerce(key, value, _CONFIG_TYPES[key])
    return values


def parse_periods(spec: str) -> list[tuple[int, int]]:
    """'1990-1991,1996-1998' -> [(1990, 1991), (1996, 1998)]"""
    if not spec.strip():
        return []
    out = []
    for chunk in spec.split(","):
        chunk = chunk.strip()
        try:
            start, end = chunk.split("-")
            out.append((int(start), int(end)))
        except ValueError:
            raise DataError(f"bad period {chunk!r}; expected START-END")
    return out


def _read_corpus(path: str, format: str) -> records.Corpus:
    parsed = records.parse_records(Path(path).read_bytes(), format)
    return records.resolve_citations(parsed)


def _load_partition(path: str, g: clustering.UGraph | None = None) -> clustering.Partition:
    return clustering.load_partition_csv(Path(path).read_text(encoding="utf-8"), g)


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


# ---------------------------------------------------------------- pipeline

ARTIFACT_KINDS = (
    "corpus_stats", "degree_histogram", "powerlaw_fit", "core_graph", "partition",
    "quotient", "dynamics", "terms", "top_cited", "layout",
)


def _stage(name: str, fn):
    try:
        return fn()
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc)


def quotient_json(q: graph.QuotientGraph) -> str:
    obj = {
        "fronts": [str(f) for f in q.front_nodes],
        "edges": [
            {"a": str(a), "b": str(b), "weight": w, "retained": (a, b) in q.retained}
            for (a, b), w in q.weighted_edges.items()
        ],
        "intra_weights": {str(f): w for f, w in sorted(q.intra_weights.items(), key=lambda kv: str(kv[0]))},
        "excluded_noise_nodes": q.excluded_noise_nodes,
    }
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def run_pipeline(cfg: PipelineConfig) -> dict:
    """Execute every stage in order and write the artifact bundle.

    Returns the manifest.  On stage failure all partial artifacts are
    removed before the StageError propagates.
    """
    cfg.validate()
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[tuple[str, str]] = []  # (relative name, kind)

    def emit(name: str, kind: str, text: str):
        _write(out / name, text)
        written.append((name, kind))

    try:
        input_bytes = _stage("ingest", lambda: Path(cfg.input).read_bytes())
        corpus = _stage("ingest", lambda: records.resolve_citations(
            records.parse_records(input_bytes, cfg.format)))
        full = _stage("ingest", lambda: graph.build_graph(corpus))

        emit("stats.txt", "corpus_stats", _stage("stats", lambda: graph.stats_report(full, corpus)))
        hist = _stage("stats", lambda: graph.indegree_histogram(full))
        emit("degree_histogram.csv", "degree_histogram", graph.histogram_csv(hist))

        fit = _stage("fit", lambda: powerlaw.fit_power_law(hist))
        emit("powerlaw_fit.json", "powerlaw_fit", powerlaw.fit_json(fit))
        emit("powerlaw_fitted.csv", "powerlaw_fit", powerlaw.fit_csv(hist, fit))

        core = _stage("core", lambda: graph.extract_core(full, cfg.k_min))
        emit("core_graph.json", "core_graph", layout.export_graph(core, format="json"))

        def do_cluster():
            if core.n_nodes == 0:
                raise StageError("cluster", "empty core")
            ug = clustering.project_undirected(core)
            if ug.m == 0:
                raise StageError("cluster", "empty core (no edges at this k_min)")
            p = clustering.cluster_cnm(ug)
            return clustering.filter_small(p, cfg.min_internal_edges)

        partition = _stage("cluster", do_cluster)
        emit("partition.csv", "partition", clustering.partition_csv(partition))
        emit("partition.json", "partition", clustering.partition_json(partition))

        q = _stage("quotient", lambda: graph.quotient(
            core, partition.assignment, cfg.quotient_min_weight, cfg.quotient_keep_max))
        emit("quotient.json", "quotient", quotient_json(q))

        dyn = _stage("dynamics", lambda: dynamics.yearly_counts(corpus, partition))
        summary = _stage("dynamics", lambda: dynamics.peak_summary(dyn, parse_periods(cfg.periods)))
        emit("dynamics.csv", "dynamics", dynamics.dynamics_csv(dyn))
        emit("peaks.json", "dynamics", dynamics.peaks_json(dyn, summary))

        stop = _stage("terms", lambda: terms.load_stopwords(cfg.stopwords or None))
        scores = _stage("terms", lambda: terms.score_terms(
            corpus, partition, cfg.term_top_k, cfg.term_statistic, stop, threads=cfg.threads))
        emit("terms.csv", "terms", terms.terms_csv(scores))
        emit("top_cited.csv", "top_cited", _stage("terms", lambda: terms.top_cited_csv(
            full, corpus, partition, cfg.top_cited_n)))

        coords = _stage("layout", lambda: layout.layout_force(
            core, cfg.layout_seed, cfg.layout_iterations))
        emit("layout.graphml", "layout", _stage("layout", lambda: layout.export_graph(
            core, coords, partition, format="graphml")))

        manifest = {
            "input_sha256": hashlib.sha256(input_bytes).hexdigest(),
            "config": {
                k: getattr(cfg, k)
                for k in sorted(_CONFIG_TYPES)
                if k not in ("input", "out_dir", "threads")
            },
            "artifacts": [
                {
                    "path": name,
                    "kind": kind,
                    "bytes": (out / name).stat().st_size,
                    "sha256": hashlib.sha256((out / name).read_bytes()).hexdigest(),
                }
                for name, kind in sorted(written)
            ],
        }
        _write(out / "manifest.json", json.dumps(manifest, sort_keys=True, indent=2) + "\n")
        return manifest
    except StageError:
        for name, _ in written:
            (out / name).unlink(missing_ok=True)
        (out / "manifest.json").unlink(missing_ok=True)
        raise


# ---------------------------------------------------------------- commands

def _cmd_ingest(args):
    corpus = _read_corpus(args.input, args.format)
    out = Path(args.out)
    _write(out / "corpus.jsonl", records.records_to_lines(corpus.records))
    links = "citing,cited\n" + "".join(f"{u},{v}\n" for u, v in corpus.links)
    _write(out / "links.csv", links)
    full = graph.build_graph(corpus)
    _write(out / "stats.txt", graph.stats_report(full, corpus))
    print(f"{len(corpus.records)} records, {len(corpus.links)} links, "
          f"{corpus.unresolved_count} unresolved refs")
    return 0


def _cmd_stats(args):
    corpus = _read_corpus(args.input, args.format)
    full = graph.build_graph(corpus)
    if args.largest_component:
        full, _ = graph.largest_component(full)
    print(graph.stats_report(full, corpus), end="")
    if args.out:
        _write(Path(args.out), graph.histogram_csv(graph.indegree_histogram(full)))
    return 0


def _cmd_fit(args):
    corpus = _read_corpus(args.input, args.format)
    hist = graph.indegree_histogram(graph.build_graph(corpus))
    fit = powerlaw.fit_power_law(hist)
    print(f"a={fit.a:.6g} b={fit.b:.6g} r2_loglog={fit.r2_loglog:.6g} "
          f"corr_linear={fit.corr_linear:.6g} n_points={fit.n_points}")
    if args.out_json:
        _write(Path(args.out_json), powerlaw.fit_json(fit))
    if args.out_csv:
        _write(Path(args.out_csv), powerlaw.fit_csv(hist, fit))
    return 0


def _cmd_core(args):
    corpus = _read_corpus(args.input, args.format)
    full = graph.build_graph(corpus)
    core = graph.extract_core(full, args.k_min)
    _write(Path(args.out), layout.export_graph(core, format="json"))
    print(f"core at k_min={args.k_min}: {core.n_nodes} nodes, {core.n_edges} edges")
    return 0


def _load_graph(path: str) -> graph.CitationGraph:
    return layout.load_graph_json(Path(path).read_text(encoding="utf-8"))


def _cmd_cluster(args):
    g = _load_graph(args.graph)
    ug = clustering.project_undirected(g)
    p = clustering.cluster_cnm(ug)
    p = clustering.filter_small(p, args.min_internal_edges)
    _write(Path(args.out_csv), clustering.partition_csv(p))
    if args.out_json:
        _write(Path(args.out_json), clustering.partition_json(p))
    print(f"{len(p.fronts)} fronts, q={p.q:.6f}, {len(p.noise_nodes())} noise nodes")
    return 0


def _cmd_subcluster(args):
    g = _load_graph(args.graph)
    ug = clustering.project_undirected(g)
    p = _load_partition(args.partition, ug)
    front = int(args.front) if args.front.isdigit() else args.front
    sub = clustering.subcluster(ug, p, front)
    _write(Path(args.out_csv), clustering.partition_csv(sub))
    if args.out_json:
        _write(Path(args.out_json), clustering.partition_json(sub))
    print(f"front {front}: {len(sub.fronts)} sub-fronts, q={sub.q:.6f}")
    return 0


def _cmd_quotient(args):
    g = _load_graph(args.graph)
    p = _load_partition(args.partition)
    q = graph.quotient(g, p.assignment, args.min_weight, args.keep_max)
    _write(Path(args.out), quotient_json(q))
    retained = sum(1 for pair in q.weighted_edges if pair in q.retained)
    print(f"{len(q.front_nodes)} fronts, {len(q.weighted_edges)} inter-front edges, "
          f"{retained} retained")
    return 0


def _cmd_dynamics(args):
    corpus = _read_corpus(args.input, args.format)
    p = _load_partition(args.partition)
    dyn = dynamics.yearly_counts(corpus, p)
    summary = dynamics.peak_summary(dyn, parse_periods(args.periods))
    _write(Path(args.out_csv), dynamics.dynamics_csv(dyn))
    if args.out_peaks:
        _write(Path(args.out_peaks), dynamics.peaks_json(dyn, summary))
    for front, (peak, period) in sorted(summary.items(), key=lambda kv: str(kv[0])):
        print(f"front {front}: peak {peak} (period {period})")
    return 0


def _cmd_terms(args):
    corpus = _read_corpus(args.input, args.format)
    p = _load_partition(args.partition)
    stop = terms.load_stopwords(args.stopwords or None)
    scores = terms.score_terms(corpus, p, args.k, args.statistic, stop, threads=args.threads)
    _write(Path(args.out), terms.terms_csv(scores))
    if args.top_cited_out:
        full = graph.build_graph(corpus)
        _write(Path(args.top_cited_out), terms.top_cited_csv(full, corpus, p, args.top_cited_n))
    print(f"scored {len(scores)} fronts")
    return 0


def _cmd_layout(args):
    g = _load_graph(args.graph)
    p = _load_partition(args.partition) if args.partition else None
    coords = layout.layout_force(g, args.seed, args.iterations)
    _write(Path(args.out), layout.export_graph(g, coords, p, format=args.export_format))
    print(f"laid out {g.n_nodes} nodes in {args.iterations} iterations (seed {args.seed})")
    return 0


def _cmd_synth(args):
    front_specs = []
    for i, chunk in enumerate(args.fronts.split(","), start=1):
        try:
            size_part, years_part = chunk.strip().split(":")
            y0, y1 = years_part.split("-")
            spec = synth.FrontSpec(int(size_part), (int(y0), int(y1)),
                                   synth.default_theme_terms(i, args.theme_terms))
        except ValueError:
            raise DataError(f"bad front spec {chunk!r}; expected SIZE:Y0-Y1")
        front_specs.append(spec)
    cfg = synth.SynthConfig(
        fronts=front_specs, p_in=args.p_in, p_out=args.p_out,
        pa_strength=args.pa_strength, refs_per_paper=args.refs, seed=args.seed,
    )
    corpus, truth = synth.generate_corpus(cfg)
    out = Path(args.out)
    _write(out / "records.jsonl", records.records_to_lines(corpus.records))
    years = {r.uid: r.year for r in corpus.records}
    _write(out / "ground_truth.csv", synth.truth_csv(truth, years))
    print(f"{len(corpus.records)} records, {len(corpus.links)} links -> {out}")
    return 0


def _cmd_run(args):
    values = load_config(args.config) if args.config else {}
    cfg = PipelineConfig()
    for f in fields(PipelineConfig):
        if f.name in values:
            setattr(cfg, f.name, values[f.name])
        override = getattr(args, f.name, None)
        if override is not None:
            setattr(cfg, f.name, override)
    manifest = run_pipeline(cfg)
    print(f"wrote {len(manifest['artifacts'])} artifacts to {cfg.out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="citefronts",
        description="Detect and track research fronts in a citation corpus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_corpus_args(p):
        p.add_argument("--input", required=True, help="record file")
        p.add_argument("--format", default="lines", choices=["lines", "tagged"])

    p = sub.add_parser("ingest", help="parse records and resolve citations")
    add_corpus_args(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("stats", help="graph statistics and degree histogram")
    add_corpus_args(p)
    p.add_argument("--largest-component", action="store_true")
    p.add_argument("--out", help="degree histogram CSV path")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("fit", help="power-law fit of the indegree histogram")
    add_corpus_args(p)
    p.add_argument("--out-json")
    p.add_argument("--out-csv")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("core", help="extract the high-indegree core subgraph")
    add_corpus_args(p)
    p.add_argument("--k-min", type=int, required=True, help="indegree threshold")
    p.add_argument("--out", required=True, help="core graph JSON path")
    p.set_defaults(func=_cmd_core)

    p = sub.add_parser("cluster", help="greedy modularity clustering")
    p.add_argument("--graph", required=True, help="graph JSON path")
    p.add_argument("--min-internal-edges", type=int, default=100)
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-json")
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("subcluster", help="re-cluster one front")
    p.add_argument("--graph", required=True)
    p.add_argument("--partition", required=True, help="partition CSV path")
    p.add_argument("--front", required=True)
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-json")
    p.set_defaults(func=_cmd_subcluster)

    p = sub.add_parser("quotient", help="front-level aggregated graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--partition", required=True)
    p.add_argument("--min-weight", type=int, default=500)
    p.add_argument("--keep-max", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_quotient)

    p = sub.add_parser("dynamics", help="papers-per-year trajectories and peaks")
    add_corpus_args(p)
    p.add_argument("--partition", required=True)
    p.add_argument("--periods", default="", help="e.g. 1990-1991,1996-1998")
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-peaks")
    p.set_defaults(func=_cmd_dynamics)

    p = sub.add_parser("terms", help="distinctive terms and top-cited papers")
    add_corpus_args(p)
    p.add_argument("--partition", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--statistic", default="llr", choices=["llr", "chi2"])
    p.add_argument("--stopwords", default="", help="override the bundled stopword list")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--top-cited-n", type=int, default=5)
    p.add_argument("--out", required=True)
    p.add_argument("--top-cited-out")
    p.set_defaults(func=_cmd_terms)

    p = sub.add_parser("layout", help="force-directed layout and export")
    p.add_argument("--graph", required=True)
    p.add_argument("--partition")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--iterations", type=int, default=100)
    p.add_argument("--export-format", default="graphml", choices=["graphml", "dot", "json"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_layout)

    p = sub.add_parser("synth", help="generate a synthetic corpus with ground truth")
    p.add_argument("--fronts", required=True, help="e.g. 300:1985-1992,250:1993-2000")
    p.add_argument("--p-in", type=float, default=1.0)
    p.add_argument("--p-out", type=float, default=0.02)
    p.add_argument("--pa-strength", type=float, default=1.0)
    p.add_argument("--refs", type=float, default=5.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--theme-terms", type=int, default=10)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("run", help="full pipeline from a config file")
    p.add_argument("--config", help="key=value config file")
    for f in fields(PipelineConfig):
        flag = "--" + f.name.replace("_", "-")
        if _CONFIG_TYPES[f.name] is bool:
            p.add_argument(flag, action=argparse.BooleanOptionalAction, default=None)
        elif _CONFIG_TYPES[f.name] is int:
            p.add_argument(flag, type=int, default=None)
        else:
            p.add_argument(flag, default=None)
    p.set_defaults(func=_cmd_run)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (ParseError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except CiteFrontsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
