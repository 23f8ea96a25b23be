"""Papers-per-year trajectories per front and peak-period grouping."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .clustering import Partition
from .errors import DataError
from .graph import NOISE
from .records import Corpus

NO_PERIOD = "NONE"


@dataclass
class FrontDynamics:
    counts: dict  # front id -> {year -> paper count}
    peaks: dict  # front id -> peak year
    missing_year_count: int


def yearly_counts(corpus: Corpus, p: Partition) -> FrontDynamics:
    """Count each non-noise front's papers per publication year.

    Papers without a year are excluded from the trajectories and tallied
    in ``missing_year_count``.
    """
    uids = {r.uid for r in corpus.records}
    missing_nodes = [u for u in p.assignment if u not in uids]
    if missing_nodes:
        raise DataError(f"partition nodes not in corpus: {sorted(missing_nodes)[:5]}")

    year_of = {r.uid: r.year for r in corpus.records}
    counts: dict = {}
    missing = 0
    for uid, front in p.assignment.items():
        if front == NOISE:
            continue
        year = year_of[uid]
        if year is None:
            missing += 1
            continue
        by_year = counts.setdefault(front, {})
        by_year[year] = by_year.get(year, 0) + 1

    peaks = {f: _peak_year(by_year) for f, by_year in counts.items()}
    return FrontDynamics(counts=counts, peaks=peaks, missing_year_count=missing)


def _peak_year(by_year: dict) -> int:
    # argmax count, ties to the earliest year
    return min(by_year, key=lambda y: (-by_year[y], y))


def peak_summary(d: FrontDynamics, periods: list[tuple[int, int]]) -> dict:
    """Map each front to (peak_year, period index containing it or NONE).

    Periods are inclusive (start, end) ranges; they must be disjoint and
    ascending.
    """
    for start, end in periods:
        if end < start:
            raise DataError(f"period ({start}, {end}) has end before start")
    ordered = sorted(periods)
    for (s1, e1), (s2, e2) in zip(ordered, ordered[1:]):
        if s2 <= e1:
            raise DataError(f"periods ({s1}, {e1}) and ({s2}, {e2}) overlap")
    if list(periods) != ordered:
        raise DataError("periods must be ascending")

    summary = {}
    for front, peak in d.peaks.items():
        index = NO_PERIOD
        for i, (start, end) in enumerate(periods):
            if start <= peak <= end:
                index = i
                break
        summary[front] = (peak, index)
    return summary


def dynamics_csv(d: FrontDynamics) -> str:
    """Year-by-front count matrix (rows = years, columns = fronts)."""
    fronts = sorted(d.counts, key=str)
    years = sorted({y for by_year in d.counts.values() for y in by_year})
    lines = ["year," + ",".join(str(f) for f in fronts)]
    for y in years:
        row = [str(d.counts[f].get(y, 0)) for f in fronts]
        lines.append(f"{y}," + ",".join(row))
    return "\n".join(lines) + "\n"


def peaks_json(d: FrontDynamics, summary: dict) -> str:
    obj = {
        "missing_year_count": d.missing_year_count,
        "fronts": {
            str(f): {"peak_year": peak, "period": index}
            for f, (peak, index) in sorted(summary.items(), key=lambda kv: str(kv[0]))
        },
    }
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
