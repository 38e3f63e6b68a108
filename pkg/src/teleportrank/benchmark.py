"""Planted-partition benchmarks and the ranking/clustering sweep harnesses.

The generator produces directed unweighted graphs with a known community
structure and a tunable mixing rate mu: each node sends a fraction mu of
its out-links to uniformly random nodes outside its community and the rest
to uniformly random members of its community.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph
from .mapeq import build_flow, codelength, optimize_partition
from .metrics import Partition, cosine_similarity, partition_nmi, rank_order_nmi
from .teleport import TeleportConfig, stationary

__all__ = ["BenchmarkParams", "SweepResult", "planted_partition_graph",
           "phase_diagram", "robustness_sweep", "SCHEME_TAGS"]

SCHEME_TAGS = {
    "rec-node": ("node", "recorded"),
    "rec-link": ("link", "recorded"),
    "unrec-node": ("node", "unrecorded"),
    "unrec-link": ("link", "unrecorded"),
}

THREADS_ENV = "TELEPORTRANK_THREADS"


@dataclass(frozen=True)
class BenchmarkParams:
    """Generator settings for one planted-partition realization."""

    n: int = 1000
    s_min: int = 20
    s_max: int = 50
    k_out: float = 7.5
    mu: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two nodes")
        if not (2 <= self.s_min <= self.s_max):
            raise ValueError("community sizes must satisfy 2 <= s_min <= s_max")
        if not (0.0 <= self.mu <= 1.0):
            raise ValueError("mixing rate mu must lie in [0, 1]")
        if self.k_out <= 0:
            raise ValueError("k_out must be positive")
        # Worst-case internal degree must fit inside the smallest community.
        if self.s_min < self.k_out * (1.0 - self.mu) + 1:
            raise ValueError(
                f"infeasible: s_min={self.s_min} < k_out*(1-mu)+1 = "
                f"{self.k_out * (1.0 - self.mu) + 1:.2f}")
        if int(np.ceil(self.k_out)) > self.n - self.s_max:
            raise ValueError("not enough external nodes for the requested out-degree")


def _draw_sizes(params: BenchmarkParams, rng) -> list[int]:
    # Uniform draws from [s_min, s_max]; the tail is adjusted so the final
    # community stays feasible (it may exceed s_max for very narrow ranges).
    sizes = []
    left = params.n
    while left > params.s_max:
        s = int(rng.integers(params.s_min, params.s_max + 1))
        if left - s < params.s_min:
            s = left - params.s_min
            if s < params.s_min:
                break
        sizes.append(s)
        left -= s
    sizes.append(left)
    return sizes


def planted_partition_graph(params: BenchmarkParams) -> tuple[Graph, Partition]:
    """Generate a directed benchmark graph and its planted partition.

    Every node gets an out-degree of floor(k_out) or ceil(k_out) (chosen so
    the expectation is k_out); the external link count is the binomially
    rounded value of degree * mu, so the expected external fraction matches
    mu exactly. Targets are drawn without replacement, excluding self-loops
    and duplicate directed links. Deterministic given (params, seed).
    """
    rng = np.random.default_rng(params.seed)
    sizes = _draw_sizes(params, rng)
    community = np.repeat(np.arange(len(sizes)), sizes)
    n = params.n

    base = int(np.floor(params.k_out))
    frac = params.k_out - base
    degrees = base + (rng.random(n) < frac).astype(np.int64)

    ext_mean = degrees * params.mu
    ext_base = np.floor(ext_mean).astype(np.int64)
    ext = ext_base + (rng.random(n) < (ext_mean - ext_base)).astype(np.int64)
    ext = np.minimum(ext, degrees)

    boundaries = np.cumsum([0] + sizes)
    src_list: list[np.ndarray] = []
    dst_list: list[np.ndarray] = []
    all_nodes = np.arange(n)
    for c, (lo, hi) in enumerate(zip(boundaries[:-1], boundaries[1:])):
        members = all_nodes[lo:hi]
        outside = np.concatenate([all_nodes[:lo], all_nodes[hi:]])
        for i in members:
            k_int = int(degrees[i] - ext[i])
            k_ext = int(ext[i])
            k_int = min(k_int, members.size - 1)
            k_ext = min(k_ext + (int(degrees[i] - ext[i]) - k_int), outside.size)
            if k_int > 0:
                pool = members[members != i]
                dst_list.append(rng.choice(pool, size=k_int, replace=False))
                src_list.append(np.full(k_int, i))
            if k_ext > 0:
                dst_list.append(rng.choice(outside, size=k_ext, replace=False))
                src_list.append(np.full(k_ext, i))
    src = np.concatenate(src_list)
    dst = np.concatenate(dst_list)
    graph = Graph(n, src, dst, np.ones(src.size))
    return graph, Partition(community)


@dataclass
class SweepResult:
    """Tabular sweep output: one dict per cell plus run metadata."""

    rows: list[dict] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def columns(self) -> list[str]:
        cols: list[str] = []
        for row in self.rows:
            for key in row:
                if key not in cols:
                    cols.append(key)
        return cols

    def to_csv(self, stream) -> None:
        import csv

        cols = self.columns()
        writer = csv.DictWriter(stream, fieldnames=cols)
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: _fmt(row.get(k)) for k in cols})

    def to_json_obj(self) -> dict:
        return {"meta": self.meta, "rows": self.rows}


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.12g}"
    return value


def _cell_seed(master: int, *coords: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=master, spawn_key=tuple(coords))


def _phase_cell(args):
    (params_tuple, mu, master_seed, mu_idx, seed_idx, seed_val, rate_idx, rate,
     recording, scheme, passes) = args
    try:
        params = BenchmarkParams(*params_tuple, mu=mu, seed=seed_val)
        graph, planted = planted_partition_graph(params)
        alpha = 1.0 - rate
        cfg_rec = TeleportConfig(alpha=alpha, scheme=scheme, recording="recorded")
        cfg_unrec = TeleportConfig(alpha=alpha, scheme=scheme, recording="unrecorded")
        flow_rec = build_flow(graph, cfg_rec)
        flow_unrec = build_flow(graph, cfg_unrec)
        flow = flow_rec if recording == "recorded" else flow_unrec
        opt_seed = _cell_seed(master_seed, mu_idx, seed_idx, rate_idx,
                              0 if recording == "recorded" else 1)
        found = optimize_partition(flow, seed=int(opt_seed.generate_state(1)[0]),
                                   passes=passes)
        one = Partition(np.zeros(graph.n, dtype=np.int64))
        return {
            "mu": mu,
            "teleport_rate": rate,
            "recording": recording,
            "scheme": scheme,
            "seed": seed_val,
            "nmi_vs_planted": partition_nmi(found, planted),
            "n_modules": found.n_modules,
            "codelength_found": codelength(flow, found).total_bits,
            "codelength_onemodule_recorded": codelength(flow_rec, one).total_bits,
            "codelength_onemodule_unrecorded": codelength(flow_unrec, one).total_bits,
            "codelength_planted_recorded": codelength(flow_rec, planted).total_bits,
            "codelength_planted_unrecorded": codelength(flow_unrec, planted).total_bits,
        }
    except Exception as exc:  # keep the sweep alive; the row records the failure
        return {"mu": mu, "teleport_rate": rate, "recording": recording,
                "scheme": scheme, "seed": seed_val, "error": str(exc)}


def _n_workers() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def phase_diagram(mu_grid, rate_grid, recordings=("recorded", "unrecorded"),
                  seeds=5, *, scheme: str = "node", params: BenchmarkParams | None = None,
                  master_seed: int = 0, passes: int = 10) -> SweepResult:
    """Cluster benchmark graphs across a (mu, teleport-rate) grid.

    For every cell a fresh graph is generated per seed and clustered under
    the given recording mode(s); the row records the similarity of the
    found partition to the planted one and the codelengths of the planted
    and one-module partitions under both recording conventions. Cells are
    independent and run in parallel when the ``TELEPORTRANK_THREADS``
    environment variable exceeds 1.
    """
    mu_grid = list(mu_grid)
    rate_grid = list(rate_grid)
    if not mu_grid or not rate_grid:
        raise ValueError("mu and teleport-rate grids must be non-empty")
    if isinstance(recordings, str):
        recordings = (recordings,)
    base = params or BenchmarkParams()
    tasks = []
    for mi, mu in enumerate(mu_grid):
        for si in range(seeds):
            seed_val = int(_cell_seed(master_seed, mi, si).generate_state(1)[0] % (2**31))
            for ri, rate in enumerate(rate_grid):
                for recording in recordings:
                    tasks.append((
                        (base.n, base.s_min, base.s_max, base.k_out), float(mu),
                        master_seed, mi, si, seed_val, ri, float(rate),
                        recording, scheme, passes))
    workers = _n_workers()
    rows: list[dict]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_phase_cell, tasks))
    else:
        rows = [_phase_cell(t) for t in tasks]
    errors = sum(1 for r in rows if r.get("error"))
    return SweepResult(rows=rows, meta={
        "kind": "phase_diagram", "scheme": scheme, "seeds": seeds,
        "passes": passes, "master_seed": master_seed, "cells": len(rows),
        "failed_cells": errors,
        "params": {"n": base.n, "s_min": base.s_min, "s_max": base.s_max,
                   "k_out": base.k_out},
    })


def robustness_sweep(g: Graph, schemes, rate_grid, reference: float = 0.15,
                     mode: str = "rank_size", repeats: int = 10, seed: int = 0,
                     *, passes: int = 10, tol: float = 1e-12) -> SweepResult:
    """Compare results across teleport rates against a reference rate.

    ``mode`` selects the comparison: ``rank_size`` (cosine similarity of
    visit rates), ``rank_order`` (exact rank-order mutual information, pair
    weights from the reference ranking), or ``clustering`` (mean weighted
    partition NMI between ``repeats`` optimizer runs at the reference rate
    and ``repeats`` runs at each grid rate, weighted by the reference visit
    rates). The grid point equal to the reference compares results with
    themselves and scores exactly 1.
    """
    if mode not in ("rank_size", "rank_order", "clustering"):
        raise ValueError(f"unknown sweep mode {mode!r}")
    if isinstance(schemes, str):
        schemes = [schemes]
    for tag in schemes:
        if tag not in SCHEME_TAGS:
            raise ValueError(f"unknown scheme tag {tag!r}; expected one of "
                             f"{sorted(SCHEME_TAGS)}")
    rate_grid = [float(r) for r in rate_grid]
    tag_index = {t: k for k, t in enumerate(sorted(SCHEME_TAGS))}
    rows = []
    for tag in schemes:
        scheme, recording = SCHEME_TAGS[tag]

        def _cfg(rate):
            return TeleportConfig(alpha=1.0 - rate, scheme=scheme,
                                  recording=recording, tol=tol)

        def _runs(rate_idx, flow):
            children = _cell_seed(seed, tag_index[tag], rate_idx).spawn(repeats)
            return [optimize_partition(
                        flow, seed=int(s.generate_state(1)[0] % (2**31)), passes=passes)
                    for s in children]

        pi_ref = stationary(g, _cfg(reference)).pi
        if mode == "clustering":
            ref_parts = _runs(0, build_flow(g, _cfg(reference)))
        for ri, rate in enumerate(rate_grid):
            if abs(rate - reference) < 1e-12:
                rows.append({"scheme": tag, "mode": mode, "teleport_rate": rate,
                             "similarity": 1.0, "reference": reference})
                continue
            if mode == "rank_size":
                pi = stationary(g, _cfg(rate)).pi
                score = cosine_similarity(pi_ref, pi)
            elif mode == "rank_order":
                pi = stationary(g, _cfg(rate)).pi
                score = rank_order_nmi(pi_ref, pi)
            else:
                parts = _runs(ri + 1, build_flow(g, _cfg(rate)))
                scores = [partition_nmi(a, b, weights=pi_ref)
                          for a in ref_parts for b in parts]
                score = float(np.mean(scores))
            rows.append({"scheme": tag, "mode": mode, "teleport_rate": rate,
                         "similarity": score, "reference": reference})
    return SweepResult(rows=rows, meta={
        "kind": "robustness", "mode": mode, "reference": reference,
        "repeats": repeats, "seed": seed, "n_nodes": g.n, "n_edges": g.n_edges,
    })
