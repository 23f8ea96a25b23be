"""Hot numeric kernels: numba-compiled with a pure-numpy fallback.

Set ``CITEFRONTS_KERNELS=numpy`` to force the fallback path (useful on
machines where numba is unavailable or for benchmarking; see
``benchmarks/bench_kernels.py``).  Both paths are deterministic run to
run; selection happens once at import time.

Kernels:

* ``fr_displacements`` -- one force-accumulation pass of the
  Fruchterman-Reingold layout (pairwise repulsion k^2/d, edge
  attraction d^2/k).
* ``pa_cumulative_weights`` -- preferential-attachment sampling weights
  (indegree + 1)^strength scaled by the intra/cross-front factor,
  accumulated for inverse-CDF target draws.
"""

from __future__ import annotations

import os

import numpy as np

_EPS = 1e-9


def _numpy_fr_displacements(pos: np.ndarray, edges: np.ndarray, k: float) -> np.ndarray:
    n = pos.shape[0]
    disp = np.zeros_like(pos)
    # pairwise repulsion, row-blocked to bound memory at O(block * n)
    block = 512
    for start in range(0, n, block):
        stop = min(start + block, n)
        delta = pos[start:stop, None, :] - pos[None, :, :]  # (b, n, 2)
        dist = np.sqrt(np.sum(delta * delta, axis=2))
        np.maximum(dist, _EPS, out=dist)
        # self-pairs have delta exactly 0, so they contribute nothing
        disp[start:stop] += (delta * ((k * k) / (dist * dist))[:, :, None]).sum(axis=1)
    if edges.size:
        delta = pos[edges[:, 0]] - pos[edges[:, 1]]
        dist = np.sqrt(np.sum(delta * delta, axis=1))
        np.maximum(dist, _EPS, out=dist)
        pull = delta * (dist / k)[:, None]
        np.subtract.at(disp, edges[:, 0], pull)
        np.add.at(disp, edges[:, 1], pull)
    return disp


def _numpy_pa_cumulative_weights(
    indegree: np.ndarray, fronts: np.ndarray, target_front: int,
    p_in: float, p_out: float, strength: float,
) -> np.ndarray:
    if strength == 1.0:
        weights = indegree + 1.0
    else:
        weights = (indegree + 1.0) ** strength
    weights *= np.where(fronts == target_front, p_in, p_out)
    return np.cumsum(weights)


fr_displacements = _numpy_fr_displacements
pa_cumulative_weights = _numpy_pa_cumulative_weights
BACKEND = "numpy"

if os.environ.get("CITEFRONTS_KERNELS", "numba").lower() != "numpy":
    try:
        from numba import njit

        @njit(cache=True)
        def _numba_fr_displacements(pos, edges, k):
            n = pos.shape[0]
            disp = np.zeros((n, 2))
            k2 = k * k
            for i in range(n):
                for j in range(i + 1, n):
                    dx = pos[i, 0] - pos[j, 0]
                    dy = pos[i, 1] - pos[j, 1]
                    dist = (dx * dx + dy * dy) ** 0.5
                    if dist < _EPS:
                        dist = _EPS
                    f = k2 / (dist * dist)
                    disp[i, 0] += dx * f
                    disp[i, 1] += dy * f
                    disp[j, 0] -= dx * f
                    disp[j, 1] -= dy * f
            for e in range(edges.shape[0]):
                a = edges[e, 0]
                b = edges[e, 1]
                dx = pos[a, 0] - pos[b, 0]
                dy = pos[a, 1] - pos[b, 1]
                dist = (dx * dx + dy * dy) ** 0.5
                if dist < _EPS:
                    dist = _EPS
                f = dist / k
                disp[a, 0] -= dx * f
                disp[a, 1] -= dy * f
                disp[b, 0] += dx * f
                disp[b, 1] += dy * f
            return disp

        @njit(cache=True)
        def _numba_pa_cumulative_weights(indegree, fronts, target_front, p_in, p_out, strength):
            n = indegree.shape[0]
            out = np.empty(n)
            acc = 0.0
            if strength == 1.0:
                # pow(x, 1.0) == x exactly; skipping it saves most of the runtime
                for i in range(n):
                    w = indegree[i] + 1.0
                    if fronts[i] == target_front:
                        w *= p_in
                    else:
                        w *= p_out
                    acc += w
                    out[i] = acc
            else:
                for i in range(n):
                    w = (indegree[i] + 1.0) ** strength
                    if fronts[i] == target_front:
                        w *= p_in
                    else:
                        w *= p_out
                    acc += w
                    out[i] = acc
            return out

        fr_displacements = _numba_fr_displacements
        pa_cumulative_weights = _numba_pa_cumulative_weights
        BACKEND = "numba"
    except ImportError:
        pass
