"""Distinctive-term mining and top-cited paper listing per front.

Distinctiveness is Dunning's signed log-likelihood ratio (G statistic)
on the 2x2 table (term in front / term elsewhere / other tokens in
front / other tokens elsewhere), computed over the abstracts of all
partitioned, non-noise records.  Pearson chi-square is available as an
alternative statistic for comparison.
"""

from __future__ import annotations

import logging
import math
import re
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources

from .clustering import Partition
from .errors import DataError
from .graph import NOISE, CitationGraph
from .records import Corpus

logger = logging.getLogger(__name__)

_SPLIT_RE = re.compile(r"[^a-z0-9-]+")
_NUMBER_RE = re.compile(r"\d+")


def load_stopwords(path=None) -> frozenset[str]:
    """Read the bundled stopword list, or a user-supplied replacement."""
    if path is None:
        text = resources.files("citefronts").joinpath("data/stopwords.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


_DEFAULT_STOPWORDS = None


def default_stopwords() -> frozenset[str]:
    global _DEFAULT_STOPWORDS
    if _DEFAULT_STOPWORDS is None:
        _DEFAULT_STOPWORDS = load_stopwords()
    return _DEFAULT_STOPWORDS


def tokenize(text: str, stopwords: frozenset[str] | None = None) -> list[str]:
    """Lowercase, split on anything outside [a-z0-9-], drop short tokens,
    pure numbers, and stopwords.  Hyphens inside tokens survive."""
    if stopwords is None:
        stopwords = default_stopwords()
    tokens = []
    for tok in _SPLIT_RE.split(text.lower()):
        tok = tok.strip("-")
        if len(tok) < 3 or _NUMBER_RE.fullmatch(tok) or tok in stopwords:
            continue
        tokens.append(tok)
    return tokens


@dataclass
class TermScore:
    term: str
    front: object
    score: float
    k_front: int
    k_rest: int


def _g_statistic(k11: int, k12: int, k21: int, k22: int) -> float:
    """2 * sum O*ln(O/E) over the 2x2 table (zero cells contribute 0)."""
    n = k11 + k12 + k21 + k22
    if n == 0:
        return 0.0
    row1, row2 = k11 + k12, k21 + k22
    col1, col2 = k11 + k21, k12 + k22
    g = 0.0
    for obs, row, col in ((k11, row1, col1), (k12, row1, col2), (k21, row2, col1), (k22, row2, col2)):
        if obs > 0:
            expected = row * col / n
            g += obs * math.log(obs / expected)
    return 2.0 * g


def _chi2_statistic(k11: int, k12: int, k21: int, k22: int) -> float:
    n = k11 + k12 + k21 + k22
    row1, row2 = k11 + k12, k21 + k22
    col1, col2 = k11 + k21, k12 + k22
    denom = row1 * row2 * col1 * col2
    if denom == 0:
        return 0.0
    return n * (k11 * k22 - k12 * k21) ** 2 / denom


_STATISTICS = {"llr": _g_statistic, "chi2": _chi2_statistic}


def signed_llr(k11: int, k12: int, k21: int, k22: int, statistic: str = "llr") -> float:
    """Association statistic signed positive iff the term is
    over-represented in the front (first column)."""
    value = _STATISTICS[statistic](k11, k12, k21, k22)
    value = max(value, 0.0)
    # over-represented: k11/(k11+k21) > k12/(k12+k22), cross-multiplied
    if k11 * (k12 + k22) < k12 * (k11 + k21):
        return -value
    return value


def _front_token_counts(corpus: Corpus, p: Partition, stopwords) -> dict[object, Counter]:
    by_uid = {r.uid: r for r in corpus.records}
    counts: dict[object, Counter] = {}
    for uid in sorted(p.assignment):
        front = p.assignment[uid]
        if front == NOISE:
            continue
        record = by_uid.get(uid)
        if record is None:
            raise DataError(f"partition node {uid!r} not in corpus")
        counts.setdefault(front, Counter()).update(tokenize(record.abstract, stopwords))
    return counts


def score_terms(
    corpus: Corpus,
    p: Partition,
    k: int = 10,
    statistic: str = "llr",
    stopwords: frozenset[str] | None = None,
    threads: int = 1,
) -> dict[object, list[TermScore]]:
    """Top-k over-represented terms per front, ties broken alphabetically.

    Fronts whose abstracts yield no tokens are omitted with a warning.
    """
    if k < 1:
        raise DataError("k must be >= 1")
    if statistic not in _STATISTICS:
        raise DataError(f"unknown statistic {statistic!r}")
    if stopwords is None:
        stopwords = default_stopwords()

    counts = _front_token_counts(corpus, p, stopwords)
    totals = {f: sum(c.values()) for f, c in counts.items()}
    grand_counts: Counter = Counter()
    for c in counts.values():
        grand_counts.update(c)
    grand_total = sum(totals.values())

    fronts = sorted(counts, key=str)
    empty = [f for f in fronts if totals[f] == 0]
    for f in empty:
        logger.warning("front %s has no abstract tokens; omitted from term scoring", f)
    fronts = [f for f in fronts if totals[f] > 0]

    def score_front(front) -> list[TermScore]:
        n_front = totals[front]
        n_rest = grand_total - n_front
        scored = []
        for term, k_front in counts[front].items():
            k_rest = grand_counts[term] - k_front
            value = signed_llr(k_front, k_rest, n_front - k_front, n_rest - k_rest, statistic)
            if value >= 0.0:
                scored.append(TermScore(term, front, value, k_front, k_rest))
        scored.sort(key=lambda t: (-t.score, t.term))
        return scored[:k]

    if threads > 1 and len(fronts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(score_front, fronts))
        return dict(zip(fronts, results))
    return {front: score_front(front) for front in fronts}


def top_cited(graph: CitationGraph, p: Partition, front, n: int = 5) -> list[str]:
    """The front's n most-cited papers by full-graph indegree
    (ties: earlier year, then uid)."""
    if n < 1:
        raise DataError("n must be >= 1")
    members = p.front_nodes(front)
    node_set = set(graph.nodes)
    unknown = [u for u in members if u not in node_set]
    if unknown:
        raise DataError(f"front members not in graph: {unknown[:5]}")
    deg = graph.indegrees()
    years = graph.years

    def key(uid):
        year = years.get(uid)
        return (-deg[uid], year if year is not None else math.inf, uid)

    return sorted(members, key=key)[:n]


def terms_csv(scores: dict[object, list[TermScore]]) -> str:
    lines = ["front,rank,term,score,k_front,k_rest"]
    for front in sorted(scores, key=str):
        for rank, t in enumerate(scores[front], start=1):
            lines.append(f"{front},{rank},{t.term},{t.score!r},{t.k_front},{t.k_rest}")
    return "\n".join(lines) + "\n"


def top_cited_csv(graph: CitationGraph, corpus: Corpus, p: Partition, n: int = 5) -> str:
    by_uid = {r.uid: r for r in corpus.records}
    lines = ["front,rank,uid,indegree,year,title"]
    deg = graph.indegrees()
    for front in sorted(p.fronts, key=str):
        for rank, uid in enumerate(top_cited(graph, p, front, n), start=1):
            record = by_uid.get(uid)
            year = record.year if record and record.year is not None else ""
            title = (record.title if record else "").replace(",", " ").replace("\n", " ")
            lines.append(f"{front},{rank},{uid},{deg[uid]},{year},{title}")
    return "\n".join(lines) + "\n"
