"""Independent small-scale solvers used to cross-check the power iteration.

Three routes: a dense direct linear solve, a truncated series expansion in
the link-following probability, and a step-by-step Monte Carlo walker. None
of them share code with the iterative solver in ``teleport``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import Graph
from .teleport import TeleportConfig, config_preference

__all__ = ["DenseSystem", "WalkResult", "build_dense_system", "dense_stationary",
           "taylor_stationary", "simulate_walker"]

DENSE_NODE_CAP = 2000


@dataclass(frozen=True)
class DenseSystem:
    """Dense column-stochastic transition matrix with teleport completion."""

    t_prime: np.ndarray
    v: np.ndarray
    alpha: float


def build_dense_system(g: Graph, v: np.ndarray, alpha: float,
                       cap: int = DENSE_NODE_CAP) -> DenseSystem:
    """Materialize T' densely: T'[i, j] = W(j->i)/w_out[j], dangling columns v."""
    if g.n > cap:
        raise ValueError(f"graph has {g.n} nodes, dense cap is {cap}")
    if not (0.0 <= alpha < 1.0):
        raise ValueError("alpha must lie in [0, 1)")
    v = np.asarray(v, dtype=np.float64)
    t = np.zeros((g.n, g.n))
    t[g.dst, g.src] = g.weight
    out = g.w_out.copy()
    nonzero = out > 0
    t[:, nonzero] /= out[nonzero]
    t[:, ~nonzero] = v[:, None]
    colsums = t.sum(axis=0)
    assert np.all(np.abs(colsums - 1.0) < 1e-12), "T' columns must sum to 1"
    return DenseSystem(t_prime=t, v=v, alpha=float(alpha))


def dense_stationary(g: Graph, v: np.ndarray, alpha: float,
                     cap: int = DENSE_NODE_CAP) -> np.ndarray:
    """Exact stationary vector pi = (1 - alpha) (I - alpha T')^-1 v.

    Uses an LU direct solve, so the result carries no iteration tolerance.
    """
    system = build_dense_system(g, v, alpha, cap=cap)
    n = g.n
    pi = np.linalg.solve(np.eye(n) - alpha * system.t_prime, (1.0 - alpha) * system.v)
    return pi / pi.sum()


def taylor_stationary(g: Graph, v: np.ndarray, alpha: float,
                      order: int) -> tuple[np.ndarray, float]:
    """Series expansion pi ~ v + sum_{k=1..K} alpha^k (T'^k - T'^{k-1}) v.

    Returns the raw partial sum (not renormalized) and the geometric tail
    bound 2 alpha^(K+1) / (1 - alpha) on its L1 distance from the exact
    stationary vector.
    """
    if order < 0:
        raise ValueError("truncation order must be >= 0")
    if not (0.0 <= alpha < 1.0):
        raise ValueError("alpha must lie in [0, 1)")
    v = np.asarray(v, dtype=np.float64)
    P = g.transition_matrix()
    dang = g.dangling_indices
    partial = v.copy()
    prev = v
    coeff = 1.0
    for _ in range(order):
        coeff *= alpha
        cur = P @ prev + prev[dang].sum() * v
        partial += coeff * (cur - prev)
        prev = cur
    bound = 2.0 * alpha ** (order + 1) / (1.0 - alpha)
    return partial, bound


@dataclass(frozen=True)
class WalkResult:
    """Empirical visit frequencies from a simulated walk."""

    freq: np.ndarray
    recorded_steps: int
    steps: int
    scheme: str
    recording: str
    seed: int

    def standard_error(self) -> np.ndarray:
        """Binomial standard error of each node's empirical frequency."""
        p = self.freq
        return np.sqrt(p * (1.0 - p) / self.recorded_steps)


def simulate_walker(g: Graph, cfg: TeleportConfig, steps: int, seed: int,
                    chunk: int = 1 << 20) -> WalkResult:
    """Simulate one walker for ``steps`` moves and tally recorded arrivals.

    The walker follows an out-link with probability alpha (chosen by
    weight) and teleports according to the scheme's preference vector
    otherwise; dangling nodes force a teleport. Under recorded schemes all
    arrivals count; under unrecorded schemes only link-following arrivals
    count, and frequencies are normalized over recorded steps only.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    v = config_preference(g, cfg)
    cum_pref = np.cumsum(v)

    # Row-wise cumulative out-weights; graph edges are already (src, dst) sorted.
    src, dst, w = g.src, g.dst, g.weight
    indptr = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=g.n), out=indptr[1:])
    cumw = np.empty(w.size)
    for j in np.unique(src):
        lo, hi = indptr[j], indptr[j + 1]
        np.cumsum(w[lo:hi], out=cumw[lo:hi])
        cumw[lo:hi] /= cumw[hi - 1]
    indices = np.ascontiguousarray(dst, dtype=np.int64)

    rng = np.random.default_rng(seed)
    record_all = cfg.recording == "recorded"
    counts = np.zeros(g.n, dtype=np.int64)
    cur = int(np.searchsorted(cum_pref, rng.random(), side="right"))
    cur = min(cur, g.n - 1)
    recorded = 0
    done = 0
    while done < steps:
        m = min(chunk, steps - done)
        u = rng.random((m, 2))
        cur, rec = _kernels.walk_chunk(indptr, indices, cumw, cum_pref,
                                       cfg.alpha, record_all, u, cur, counts)
        recorded += rec
        done += m
    if recorded == 0:
        raise RuntimeError("walk recorded no steps; unrecorded scheme on a graph "
                           "with no reachable links")
    return WalkResult(freq=counts / recorded, recorded_steps=recorded, steps=steps,
                      scheme=cfg.scheme, recording=cfg.recording, seed=seed)
