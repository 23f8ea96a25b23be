"""Least-squares power-law fit of a degree-frequency histogram.

The fit is ordinary least squares on (log10 degree, log10 count) over
degrees >= 1 (degree 0 has no logarithm).  Counts are divided by the
count of the reference (smallest) degree before taking logs: the true
count ratios are unchanged by any integer scaling of the histogram, and
IEEE division of exact integer products rounds them identically, so the
recovered exponent is bit-for-bit invariant under count scaling.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .graph import DegreeHistogram


@dataclass
class PowerLawFit:
    """Parameters of y = a * x^b plus goodness-of-fit on both scales."""

    a: float
    b: float
    r2_loglog: float
    corr_linear: float
    n_points: int

    def predict(self, degree) -> np.ndarray:
        return self.a * np.asarray(degree, dtype=float) ** self.b


def fit_power_law(hist: DegreeHistogram) -> PowerLawFit:
    degrees = np.array(sorted(d for d in hist.bins if d >= 1), dtype=float)
    if degrees.size < 2:
        raise DataError("insufficient points: need >= 2 bins with degree >= 1")
    counts = np.array([hist.bins[int(d)] for d in degrees], dtype=float)

    x = np.log10(degrees)
    ref = counts[0]
    y = np.log10(counts / ref)

    xm = x.mean()
    ym = y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    sxy = float(np.sum((x - xm) * (y - ym)))
    b = sxy / sxx
    intercept = ym - b * xm
    a = 10.0 ** intercept * ref

    residuals = y - (intercept + b * x)
    ss_res = float(np.sum(residuals**2))
    ss_tot = float(np.sum((y - ym) ** 2))
    if ss_tot <= 1e-30:
        r2 = 1.0 if ss_res <= 1e-30 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot

    fitted = a * degrees**b
    corr = _pearson(counts, fitted)

    return PowerLawFit(a=a, b=b, r2_loglog=r2, corr_linear=corr, n_points=int(degrees.size))


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    dx = x - x.mean()
    dy = y - y.mean()
    denom = math.sqrt(float(np.sum(dx**2)) * float(np.sum(dy**2)))
    if denom == 0.0:
        # one side is constant; correlation degenerates
        return 1.0 if np.allclose(x, x[0]) and np.allclose(y, y[0]) else 0.0
    return float(np.sum(dx * dy)) / denom


def fit_json(fit: PowerLawFit) -> str:
    obj = {
        "a": fit.a,
        "b": fit.b,
        "r2_loglog": fit.r2_loglog,
        "corr_linear": fit.corr_linear,
        "n_points": fit.n_points,
    }
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def fit_csv(hist: DegreeHistogram, fit: PowerLawFit) -> str:
    """CSV of (degree, observed, fitted) for plotting."""
    lines = ["degree,observed,fitted"]
    for d in sorted(x for x in hist.bins if x >= 1):
        lines.append(f"{d},{hist.bins[d]},{float(fit.predict(d))!r}")
    return "\n".join(lines) + "\n"
