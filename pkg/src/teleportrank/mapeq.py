"""Two-level map-equation codelength and a greedy partition optimizer.

The flow model distinguishes recorded walks (teleport steps carry flow,
spread over the preference vector as a rank-one component) from unrecorded
walks (only link steps carry flow; forced teleports off dangling nodes are
dropped and flows renormalized). The codelength uses module-entry rates for
the index codebook and module-exit rates inside module codebooks; for
recorded flows the two coincide at stationarity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import Graph
from .metrics import Partition
from .teleport import (ConvergenceError, TeleportConfig, config_preference,
                       stationary_recorded)

__all__ = ["FlowModel", "Codelength", "build_flow", "codelength", "optimize_partition"]


def _plogp(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    mask = x > 0
    out[mask] = x[mask] * np.log2(x[mask])
    return out


@dataclass(frozen=True)
class FlowModel:
    """Per-link flow rates and per-node visit rates induced by a walk.

    ``link_flow[e]`` is the stationary rate of steps along edge
    ``src[e] -> dst[e]``. Under recorded schemes ``tele_t[j]`` carries the
    teleportation mass leaving node j, distributed over targets as
    ``tele_v``; under unrecorded schemes both are None and link flows sum
    to one.
    """

    n: int
    src: np.ndarray
    dst: np.ndarray
    link_flow: np.ndarray
    node_rate: np.ndarray
    tele_t: np.ndarray | None
    tele_v: np.ndarray | None
    alpha: float
    scheme: str
    recording: str

    @property
    def recorded(self) -> bool:
        return self.recording == "recorded"


def build_flow(g: Graph, cfg: TeleportConfig) -> FlowModel:
    """Flow model of the configured walk on ``g``.

    Requires the stationary solve to converge; raises ConvergenceError
    otherwise.
    """
    stage = stationary_recorded(g, cfg)
    if not stage.converged:
        raise ConvergenceError(
            f"stationary solve did not reach tol={cfg.tol} within "
            f"{cfg.max_iter} iterations (residual {stage.residual:.3e})")
    rho = stage.pi
    alpha = cfg.alpha
    step = g.weight / g.w_out[g.src] * rho[g.src]  # per-link rate before damping
    if cfg.recording == "recorded":
        link_flow = alpha * step
        tele_t = (1.0 - alpha) * rho
        if g.dangling_indices.size:
            tele_t[g.dangling_indices] = rho[g.dangling_indices]
        tele_v = config_preference(g, cfg)
        node_rate = rho
    else:
        total = step.sum()
        if total <= 0:
            raise ValueError("unrecorded flow undefined: the walk has no link steps")
        link_flow = step / total
        tele_t = None
        tele_v = None
        node_rate = np.bincount(g.dst, weights=link_flow, minlength=g.n)
    return FlowModel(n=g.n, src=g.src, dst=g.dst, link_flow=link_flow,
                     node_rate=node_rate, tele_t=tele_t, tele_v=tele_v,
                     alpha=alpha, scheme=cfg.scheme, recording=cfg.recording)


@dataclass(frozen=True)
class Codelength:
    """Map-equation description length, in bits per recorded step."""

    total_bits: float
    index_bits: float
    module_bits: float
    n_modules: int


def _module_rates(flow: FlowModel, modules: np.ndarray, k: int):
    """Per-module (flow, enter, exit) under the given assignment."""
    ms = modules[flow.src]
    md = modules[flow.dst]
    cross = ms != md
    link_exit = np.bincount(ms[cross], weights=flow.link_flow[cross],
                            minlength=k).astype(np.float64)
    link_enter = np.bincount(md[cross], weights=flow.link_flow[cross],
                             minlength=k).astype(np.float64)
    mod_flow = np.bincount(modules, weights=flow.node_rate, minlength=k)
    if flow.tele_t is not None:
        t = np.bincount(modules, weights=flow.tele_t, minlength=k)
        v = np.bincount(modules, weights=flow.tele_v, minlength=k)
        t_total = flow.tele_t.sum()
        enter = link_enter + (t_total - t) * v
        exit_ = link_exit + t * (1.0 - v)
    else:
        enter = link_enter
        exit_ = link_exit
    return mod_flow, enter, exit_


def codelength(flow: FlowModel, partition: Partition) -> Codelength:
    """Evaluate the two-level map equation for a partition.

    With a single module this reduces to the entropy of the node visit
    rates. The index codebook is weighted by module-entry rates and each
    module codebook by its total use rate (node visits plus exits).
    """
    if partition.n != flow.n:
        raise ValueError(f"partition covers {partition.n} nodes, flow has {flow.n}")
    modules = partition.modules
    k = partition.n_modules
    mod_flow, enter, exit_ = _module_rates(flow, modules, k)
    q = enter.sum()
    index_bits = float(_plogp(np.array([q])).sum() - _plogp(enter).sum())
    module_bits = float(-_plogp(exit_).sum() + _plogp(exit_ + mod_flow).sum()
                        - _plogp(flow.node_rate).sum())
    return Codelength(total_bits=index_bits + module_bits, index_bits=index_bits,
                      module_bits=module_bits, n_modules=k)


class _Level:
    """Aggregated flow network at one level of the optimizer."""

    __slots__ = ("m", "out_indptr", "out_indices", "out_flow", "in_indptr",
                 "in_indices", "in_flow", "node_flow", "node_out", "node_in",
                 "tele_t", "tele_v", "t_total")

    def __init__(self, m, src, dst, flow_vals, node_flow, tele_t, tele_v, t_total):
        self.m = m
        keep = src != dst  # self-links never cross module boundaries
        src, dst, flow_vals = src[keep], dst[keep], flow_vals[keep]
        order = np.lexsort((dst, src))
        s, d, f = src[order], dst[order], flow_vals[order]
        self.out_indptr = np.zeros(m + 1, dtype=np.int64)
        np.cumsum(np.bincount(s, minlength=m), out=self.out_indptr[1:])
        self.out_indices = np.ascontiguousarray(d)
        self.out_flow = np.ascontiguousarray(f)
        order = np.lexsort((s, d))
        self.in_indptr = np.zeros(m + 1, dtype=np.int64)
        np.cumsum(np.bincount(d, minlength=m), out=self.in_indptr[1:])
        self.in_indices = np.ascontiguousarray(s[order])
        self.in_flow = np.ascontiguousarray(f[order])
        self.node_flow = node_flow
        # bincount yields int zeros for empty weighted input; force float
        self.node_out = np.bincount(s, weights=f, minlength=m).astype(np.float64)
        self.node_in = np.bincount(d, weights=f, minlength=m).astype(np.float64)
        self.tele_t = tele_t
        self.tele_v = tele_v
        self.t_total = t_total

    @classmethod
    def from_flow(cls, flow: FlowModel) -> "_Level":
        if flow.tele_t is not None:
            tele_t = flow.tele_t.astype(np.float64)
            tele_v = flow.tele_v.astype(np.float64)
            t_total = float(flow.tele_t.sum())
        else:
            tele_t = np.zeros(flow.n)
            tele_v = np.zeros(flow.n)
            t_total = 0.0
        return cls(flow.n, flow.src.astype(np.int64), flow.dst.astype(np.int64),
                   flow.link_flow.astype(np.float64),
                   flow.node_rate.astype(np.float64), tele_t, tele_v, t_total)

    def aggregate(self, modules: np.ndarray, k: int) -> "_Level":
        """Condense modules into supernodes, merging parallel flows."""
        s = modules[_csr_sources(self.out_indptr)]
        d = modules[self.out_indices]
        f = self.out_flow
        key = s * k + d
        order = np.argsort(key, kind="stable")
        key, f = key[order], f[order]
        first = np.empty(key.size, dtype=bool)
        if key.size:
            first[0] = True
            first[1:] = key[1:] != key[:-1]
            starts = np.flatnonzero(first)
            key = key[starts]
            f = np.add.reduceat(f, starts)
        node_flow = np.bincount(modules, weights=self.node_flow, minlength=k)
        tele_t = np.bincount(modules, weights=self.tele_t, minlength=k)
        tele_v = np.bincount(modules, weights=self.tele_v, minlength=k)
        return _Level(k, (key // k).astype(np.int64), (key % k).astype(np.int64),
                      f, node_flow, tele_t, tele_v, self.t_total)


def _csr_sources(indptr: np.ndarray) -> np.ndarray:
    """Expand a CSR indptr into the per-entry row index."""
    return np.repeat(np.arange(indptr.size - 1, dtype=np.int64), np.diff(indptr))


class _MoveState:
    """Mutable module aggregates consumed by the sweep kernel."""

    __slots__ = ("modules", "mod_flow", "mod_exit", "mod_enter", "mod_t", "mod_v",
                 "mod_size", "free_ids", "n_free", "cand", "acc_out", "acc_in",
                 "stamp", "tag")

    def __init__(self, level: _Level, modules: np.ndarray):
        m = level.m
        self.modules = modules.astype(np.int64).copy()
        used = np.unique(self.modules)
        self.mod_flow = np.zeros(m)
        self.mod_exit = np.zeros(m)
        self.mod_enter = np.zeros(m)
        self.mod_t = np.zeros(m)
        self.mod_v = np.zeros(m)
        self.mod_size = np.zeros(m, dtype=np.int64)
        np.add.at(self.mod_size, self.modules, 1)
        np.add.at(self.mod_flow, self.modules, level.node_flow)
        np.add.at(self.mod_t, self.modules, level.tele_t)
        np.add.at(self.mod_v, self.modules, level.tele_v)
        s = self.modules[_csr_sources(level.out_indptr)]
        d = self.modules[level.out_indices]
        cross = s != d
        np.add.at(self.mod_exit, s[cross], level.out_flow[cross])
        np.add.at(self.mod_enter, d[cross], level.out_flow[cross])
        free = np.setdiff1d(np.arange(m, dtype=np.int64), used)
        self.free_ids = np.zeros(m, dtype=np.int64)
        self.free_ids[:free.size] = free
        self.n_free = int(free.size)
        self.cand = np.zeros(m + 2, dtype=np.int64)
        self.acc_out = np.zeros(m)
        self.acc_in = np.zeros(m)
        self.stamp = np.full(m, -1, dtype=np.int64)
        self.tag = 0

    def sweep(self, level: _Level, order: np.ndarray, eps: float):
        moves, self.n_free, delta, self.tag = _kernels.move_sweep(
            order,
            level.out_indptr, level.out_indices, level.out_flow,
            level.in_indptr, level.in_indices, level.in_flow,
            level.node_flow, level.node_out, level.node_in,
            level.tele_t, level.tele_v, level.t_total,
            self.modules,
            self.mod_flow, self.mod_exit, self.mod_enter, self.mod_t, self.mod_v,
            self.mod_size,
            self.free_ids, self.n_free,
            eps,
            self.cand, self.acc_out, self.acc_in, self.stamp, self.tag)
        return moves, delta


def _local_moves(level: _Level, modules: np.ndarray, rng, eps: float,
                 max_sweeps: int) -> np.ndarray:
    state = _MoveState(level, modules)
    for _ in range(max_sweeps):
        order = rng.permutation(level.m).astype(np.int64)
        moves, _ = state.sweep(level, order, eps)
        if moves == 0:
            break
    return state.modules


def _compress(modules: np.ndarray) -> tuple[np.ndarray, int]:
    uniq, inverse = np.unique(modules, return_inverse=True)
    return inverse.astype(np.int64), int(uniq.size)


def _louvain_round(base: _Level, start: np.ndarray, rng, eps: float,
                   max_sweeps: int) -> np.ndarray:
    """One multi-level pass: local moves from ``start``, aggregate, recurse."""
    level = base
    current = start
    assignment = None
    while True:
        moved = _local_moves(level, current, rng, eps, max_sweeps)
        compressed, k = _compress(moved)
        assignment = compressed if assignment is None else compressed[assignment]
        if k == level.m or k == 1:
            break
        level = level.aggregate(compressed, k)
        current = np.arange(k, dtype=np.int64)
    return assignment


def _sub_level(base: _Level, nodes: np.ndarray) -> _Level:
    """Flow network induced by a node subset (internal links only)."""
    inverse = np.full(base.m, -1, dtype=np.int64)
    inverse[nodes] = np.arange(nodes.size, dtype=np.int64)
    s = _csr_sources(base.out_indptr)
    d = base.out_indices
    keep = (inverse[s] >= 0) & (inverse[d] >= 0)
    return _Level(nodes.size, inverse[s[keep]], inverse[np.asarray(d)[keep]],
                  base.out_flow[keep], base.node_flow[nodes],
                  base.tele_t[nodes], base.tele_v[nodes],
                  float(base.tele_t[nodes].sum()))


def _submodule_round(base: _Level, assign: np.ndarray, rng, eps: float,
                     max_sweeps: int) -> np.ndarray:
    """Split modules by re-clustering their internal flow, then regroup.

    Each module is clustered in isolation; the resulting submodules are
    frozen into supernodes and moved as units by a fresh multi-level pass.
    This recovers structure that single-node moves cannot reach, e.g. two
    communities glued into one module.
    """
    compressed, k = _compress(assign)
    pieces = np.full(base.m, -1, dtype=np.int64)
    next_id = 0
    for m in range(k):
        nodes = np.flatnonzero(compressed == m)
        if nodes.size <= 3:
            pieces[nodes] = next_id
            next_id += 1
            continue
        sub = _sub_level(base, nodes)
        local = _louvain_round(sub, np.arange(nodes.size, dtype=np.int64),
                               rng, eps, max_sweeps)
        pieces[nodes] = local + next_id
        next_id += int(local.max()) + 1
    piece_assign, kk = _compress(pieces)
    if kk == k:
        return compressed
    level = base.aggregate(piece_assign, kk)
    regrouped = _louvain_round(level, np.arange(kk, dtype=np.int64),
                               rng, eps, max_sweeps)
    return regrouped[piece_assign]


def optimize_partition(flow: FlowModel, seed: int = 0, passes: int = 10,
                       tolerance: float = 1e-10, max_sweeps: int = 200,
                       max_rounds: int = 50) -> Partition:
    """Search for a partition minimizing the two-level codelength.

    Runs ``passes`` independent restarts; each restart repeats multi-level
    local-move passes (re-seeded from the current partition, so found
    modules can merge, split and exchange nodes) until the codelength stops
    improving. Deterministic given ``seed``. The result is a fixed point
    under single-node moves and never describes the walk worse than the
    one-module partition.
    """
    if passes < 1:
        raise ValueError("passes must be >= 1")
    base = _Level.from_flow(flow)
    one_module = Partition(np.zeros(flow.n, dtype=np.int64))
    children = np.random.SeedSequence(seed).spawn(passes + 1)
    best_l = codelength(flow, one_module).total_bits
    best_assign = one_module.modules
    for child in children[:passes]:
        rng = np.random.default_rng(child)
        assign = np.arange(base.m, dtype=np.int64)
        l_total = np.inf
        for _ in range(max_rounds):
            assign_new = _louvain_round(base, assign, rng, tolerance, max_sweeps)
            l_new = codelength(flow, Partition(assign_new)).total_bits
            if l_new < l_total - tolerance:
                assign, l_total = assign_new, l_new
            else:
                break
        if l_total < best_l - 1e-13:
            best_l = l_total
            best_assign = assign
    # Refine the incumbent so the result is a fixed point of single moves.
    rng = np.random.default_rng(children[passes])
    refined = _local_moves(base, best_assign.copy(), rng, tolerance, max_sweeps)
    if codelength(flow, Partition(refined)).total_bits <= best_l:
        best_assign = refined
    return Partition(best_assign)
