"""Synthetic citation corpora with planted ground truth.

Papers are generated in year order; each cites earlier papers with
probability proportional to (indegree + 1)^pa_strength, scaled by p_in
inside the paper's own front and p_out across fronts.  Abstracts are
bags of per-front theme terms mixed with a shared background
vocabulary.  The generator emits real RawRecords whose cited_refs
strings resolve through the production key-matching path, half via DOI
and half via the author|year|source composite form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .clustering import Partition
from .errors import DataError
from .graph import NOISE
from .records import Corpus, RawRecord, resolve_citations

_SYLLABLES = [
    "ba", "be", "bi", "bo", "bu", "da", "de", "di", "do", "du",
    "fa", "fe", "fi", "fo", "fu", "ga", "ge", "gi", "go", "gu",
    "ka", "ke", "ki", "ko", "ku", "la", "le", "li", "lo", "lu",
    "ma", "me", "mi", "mo", "mu", "na", "ne", "ni", "no", "nu",
    "ra", "re", "ri", "ro", "ru", "sa", "se", "si", "so", "su",
    "ta", "te", "ti", "to", "tu", "va", "ve", "vi", "vo", "vu",
]

_SOURCES = [
    "J THEOR RES", "ANN NETW SCI", "INT J SYST", "PROC FIELD STUD",
    "REV QUANT METH", "ACTA INFORM", "STUD DYNAM", "B EXP ANAL",
]

BACKGROUND_VOCAB = [
    "analysis", "approach", "assay", "baseline", "cohort", "comparison",
    "condition", "control", "correlation", "criteria", "dataset", "design",
    "effect", "estimate", "evaluation", "evidence", "experiment", "factor",
    "finding", "framework", "function", "hypothesis", "impact", "increase",
    "indicator", "interaction", "level", "measurement", "mechanism",
    "method", "model", "observation", "outcome", "parameter", "pattern",
    "population", "procedure", "process", "property", "protocol", "range",
    "rate", "ratio", "reduction", "region", "relationship", "response",
    "result", "sample", "significance", "signal", "structure", "subject",
    "system", "technique", "test", "theory", "treatment", "trend",
    "validation", "variable", "variation",
]


@dataclass
class FrontSpec:
    size: int
    years: tuple[int, int]
    theme_terms: list[str]


@dataclass
class SynthConfig:
    fronts: list[FrontSpec]
    p_in: float = 1.0
    p_out: float = 0.02
    pa_strength: float = 1.0
    refs_per_paper: float = 5.0
    seed: int = 0
    theme_fraction: float = 0.6

    def validate(self):
        if not self.fronts:
            raise DataError("need at least one front")
        for f in self.fronts:
            if f.size < 1:
                raise DataError("front sizes must be >= 1")
            if f.years[1] < f.years[0]:
                raise DataError(f"bad year range {f.years}")
        if not (0.0 <= self.p_out <= self.p_in <= 1.0):
            raise DataError("need 0 <= p_out <= p_in <= 1")
        if self.refs_per_paper < 0:
            raise DataError("refs_per_paper must be >= 0")
        if not (0.0 <= self.theme_fraction <= 1.0):
            raise DataError("theme_fraction must be in [0, 1]")


@dataclass
class GroundTruth:
    labels: dict[str, int]
    peak_years: dict[int, int] = field(default_factory=dict)


def default_theme_terms(front_index: int, count: int = 10) -> list[str]:
    """Deterministic placeholder vocabulary for CLI-driven generation."""
    return [f"theme{front_index}w{i:02d}" for i in range(count)]


def _surname(index: int) -> str:
    n = len(_SYLLABLES)
    i, j, k = index % n, (index // n) % n, index // (n * n) % n
    return (_SYLLABLES[k] + _SYLLABLES[j] + _SYLLABLES[i]).capitalize()


def _year_allocation(rng, size: int, years: tuple[int, int]) -> list[int]:
    """Unimodal (triangular) allocation of papers to the active years."""
    y0, y1 = years
    span = list(range(y0, y1 + 1))
    mid = (y0 + y1) / 2.0
    weights = np.array([1.0 + min(y - y0, y1 - y) + (0.5 if y <= mid else 0.0) for y in span])
    weights /= weights.sum()
    counts = rng.multinomial(size, weights)
    return [y for y, c in zip(span, counts) for _ in range(c)]


def generate_corpus(cfg: SynthConfig) -> tuple[Corpus, GroundTruth]:
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)

    plan: list[tuple[int, int]] = []  # (year, front index 1-based)
    planted_counts: dict[int, dict[int, int]] = {}
    for fi, front in enumerate(cfg.fronts, start=1):
        years = _year_allocation(rng, front.size, front.years)
        per_year = planted_counts.setdefault(fi, {})
        for y in years:
            plan.append((y, fi))
            per_year[y] = per_year.get(y, 0) + 1
    plan.sort()

    n = len(plan)
    fronts_arr = np.array([fi for _, fi in plan], dtype=np.int64)
    indeg = np.zeros(n, dtype=np.float64)
    uids = [f"S{i:05d}" for i in range(n)]

    records: list[RawRecord] = []
    for t in range(n):
        year, fi = plan[t]
        surname = _surname(t)
        author = f"{surname} {chr(65 + t % 26)}{chr(65 + (t // 26) % 26)}"
        source = _SOURCES[fi % len(_SOURCES)]
        doi = f"10.9999/s{t:05d}" if t % 2 == 1 else None

        n_refs = int(rng.poisson(cfg.refs_per_paper))
        targets: list[int] = []
        if n_refs > 0 and t > 0:
            draws = rng.random(n_refs)
            cw = _kernels.pa_cumulative_weights(
                indeg[:t], fronts_arr[:t], fi, cfg.p_in, cfg.p_out, cfg.pa_strength
            )
            total = cw[-1]
            seen = set()
            for u in draws:
                j = int(np.searchsorted(cw, u * total, side="right"))
                j = min(j, t - 1)
                if j not in seen:
                    seen.add(j)
                    targets.append(j)
            for j in targets:
                indeg[j] += 1.0

        theme = cfg.fronts[fi - 1].theme_terms
        length = 20 + int(rng.poisson(40))
        use_theme = rng.random(length) < cfg.theme_fraction
        theme_idx = rng.integers(0, max(len(theme), 1), size=length)
        bg_idx = rng.integers(0, len(BACKGROUND_VOCAB), size=length)
        words = [
            theme[ti] if (theme and u) else BACKGROUND_VOCAB[bi]
            for u, ti, bi in zip(use_theme, theme_idx, bg_idx)
        ]
        abstract = " ".join(words)
        title = " ".join(w.capitalize() for w in words[:6])

        records.append(
            RawRecord(
                uid=uids[t],
                title=title,
                abstract=abstract,
                year=year,
                authors=[author],
                source=source,
                doi=doi,
                cited_refs=[_format_ref(records[j]) for j in targets],
            )
        )

    corpus = resolve_citations(records)
    truth = GroundTruth(
        labels={uids[t]: int(fronts_arr[t]) for t in range(n)},
        peak_years={fi: _planted_peak(per_year) for fi, per_year in planted_counts.items()},
    )
    return corpus, truth


def _planted_peak(per_year: dict[int, int]) -> int:
    return min(per_year, key=lambda y: (-per_year[y], y))


def _format_ref(target: RawRecord) -> str:
    if target.doi:
        return f"{target.authors[0]}, {target.year}, {target.source}, DOI {target.doi}"
    return f"{target.authors[0]}, {target.year}, {target.source}"


def truth_csv(truth: GroundTruth, years: dict[str, int] | None = None) -> str:
    """``uid,front,year`` rows; peak years are recomputed on load."""
    lines = ["uid,front,year"]
    years = years or {}
    for uid in sorted(truth.labels):
        lines.append(f"{uid},{truth.labels[uid]},{years.get(uid, '')}")
    return "\n".join(lines) + "\n"


def load_truth_csv(text: str) -> GroundTruth:
    labels: dict[str, int] = {}
    per_year: dict[int, dict[int, int]] = {}
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "uid,front,year":
        raise DataError("bad ground-truth CSV header")
    for ln in lines[1:]:
        uid, front, year = ln.split(",")
        labels[uid] = int(front)
        if year:
            by_year = per_year.setdefault(int(front), {})
            by_year[int(year)] = by_year.get(int(year), 0) + 1
    peaks = {f: _planted_peak(by_year) for f, by_year in per_year.items()}
    return GroundTruth(labels=labels, peak_years=peaks)


def _labels_of(p) -> dict:
    if isinstance(p, Partition):
        return {u: f for u, f in p.assignment.items() if f != NOISE}
    if isinstance(p, GroundTruth):
        return dict(p.labels)
    return {u: f for u, f in dict(p).items() if f != NOISE}


def nmi(p1, p2) -> float:
    """Normalized mutual information (arithmetic-mean normalization)
    between two partitions, evaluated on their shared non-noise nodes.

    When either side has zero entropy the score is 1.0 if both are the
    same trivial single-cluster grouping, else 0.0.
    """
    a = _labels_of(p1)
    b = _labels_of(p2)
    shared = sorted(set(a) & set(b))
    if not shared:
        raise DataError("partitions share no nodes")

    n = len(shared)
    counts_a: dict = {}
    counts_b: dict = {}
    joint: dict = {}
    for u in shared:
        la, lb = a[u], b[u]
        counts_a[la] = counts_a.get(la, 0) + 1
        counts_b[lb] = counts_b.get(lb, 0) + 1
        joint[(la, lb)] = joint.get((la, lb), 0) + 1

    h_a = -sum(c / n * math.log(c / n) for c in counts_a.values())
    h_b = -sum(c / n * math.log(c / n) for c in counts_b.values())
    if h_a == 0.0 or h_b == 0.0:
        trivial_equal = len(counts_a) == 1 and len(counts_b) == 1
        return 1.0 if trivial_equal else 0.0

    info = 0.0
    for (la, lb), c in joint.items():
        info += c / n * math.log(c * n / (counts_a[la] * counts_b[lb]))
    return info / ((h_a + h_b) / 2.0)
