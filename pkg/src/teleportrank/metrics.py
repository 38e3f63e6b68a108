"""Robustness measures for rankings and partitions.

Three measures: cosine similarity between visit-rate vectors, mutual
information between pairwise rank orders (pairs weighted by the first
ranking's visit rates), and visit-rate-weighted normalized mutual
information between partitions. All entropies are in bits and every
normalized score divides by the larger of the two entropies, so degenerate
single-outcome variables are never rewarded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Partition", "RankComparison", "PartitionComparison", "cosine_similarity",
           "rank_order_nmi", "partition_nmi", "compare_rankings", "compare_partitions"]

_DENSE_PAIR_LIMIT = 2048


def _plogp(p: np.ndarray) -> np.ndarray:
    out = np.zeros_like(p)
    mask = p > 0
    out[mask] = p[mask] * np.log2(p[mask])
    return out


class Partition:
    """Assignment of nodes to modules with dense ids starting at 0.

    Arbitrary integer labels are compressed to dense ids in order of first
    appearance, so two partitions that group nodes identically but label
    modules differently compare equal.
    """

    __slots__ = ("modules", "n_modules")

    def __init__(self, modules):
        modules = np.asarray(modules, dtype=np.int64)
        if modules.ndim != 1 or modules.size == 0:
            raise ValueError("partition needs a non-empty 1-d assignment array")
        _, first, inverse = np.unique(modules, return_index=True, return_inverse=True)
        rank = np.argsort(np.argsort(first))  # unique ids by first appearance
        self.modules = rank[inverse].astype(np.int64)
        self.modules.setflags(write=False)
        self.n_modules = int(first.size)

    @property
    def n(self) -> int:
        return int(self.modules.size)

    def module_sizes(self) -> np.ndarray:
        return np.bincount(self.modules, minlength=self.n_modules)

    def module_mass(self, weights) -> np.ndarray:
        """Total weight per module (``s_x`` when weights are visit rates)."""
        w = np.asarray(weights, dtype=np.float64)
        return np.bincount(self.modules, weights=w, minlength=self.n_modules)

    def __eq__(self, other):
        return isinstance(other, Partition) and np.array_equal(self.modules, other.modules)

    def __hash__(self):
        return hash(self.modules.tobytes())

    def __repr__(self):
        return f"Partition(n={self.n}, modules={self.n_modules})"

    def to_lines(self, labels=None) -> str:
        """Serialize as ``node_label module_id`` lines."""
        labels = labels if labels is not None else [str(i) for i in range(self.n)]
        return "".join(f"{labels[i]} {self.modules[i]}\n" for i in range(self.n))

    @classmethod
    def from_lines(cls, text: str) -> tuple["Partition", list[str]]:
        """Parse ``node_label module_id`` lines; returns (partition, labels)."""
        labels, mods = [], []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'node module', got {line!r}")
            labels.append(parts[0])
            try:
                mods.append(int(parts[1]))
            except ValueError:
                raise ValueError(f"line {lineno}: invalid module id {parts[1]!r}") from None
        if not labels:
            raise ValueError("empty partition file")
        return cls(mods), labels


def cosine_similarity(pi_x, pi_y) -> float:
    """Cosine of the angle between two visit-rate vectors, in [0, 1]."""
    x = np.asarray(pi_x, dtype=np.float64)
    y = np.asarray(pi_y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("rank vectors must be 1-d and equally long")
    nx = np.sqrt((x * x).sum())
    ny = np.sqrt((y * y).sum())
    if nx == 0 or ny == 0:
        raise ValueError("cosine similarity undefined for a zero vector")
    return float(min(1.0, max(0.0, (x * y).sum() / (nx * ny))))


class _Fenwick:
    """Prefix-sum tree over float weights."""

    __slots__ = ("tree",)

    def __init__(self, size: int):
        self.tree = np.zeros(size + 1)

    def add(self, i: int, w: float) -> None:
        i += 1
        tree = self.tree
        while i < tree.size:
            tree[i] += w
            i += i & (-i)

    def prefix(self, i: int) -> float:
        # Sum of weights at positions 0..i-1.
        s = 0.0
        tree = self.tree
        while i > 0:
            s += tree[i]
            i -= i & (-i)
        return float(s)


def _pair_table_dense(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """2x2 joint mass over (X, Y) from all ordered pairs, O(N^2) memory."""
    w = np.outer(x, x)
    np.fill_diagonal(w, 0.0)
    xf = x[:, None] >= x[None, :]
    yf = y[:, None] >= y[None, :]
    table = np.empty((2, 2))
    table[0, 0] = w[xf & yf].sum()
    table[0, 1] = w[xf & ~yf].sum()
    table[1, 0] = w[~xf & yf].sum()
    table[1, 1] = w[~xf & ~yf].sum()
    return table


def _pair_table_sweep(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Same 2x2 joint mass via sorting and prefix sums, O(N log N)."""
    n = x.size
    y_rank = {v: r for r, v in enumerate(np.unique(y))}
    ry = np.array([y_rank[v] for v in y], dtype=np.int64)
    order = np.argsort(x, kind="stable")
    tree = _Fenwick(len(y_rank))
    table = np.zeros((2, 2))
    total_before = 0.0
    i = 0
    while i < n:
        j = i
        while j < n and x[order[j]] == x[order[i]]:
            j += 1
        group = order[i:j]
        # Pairs against strictly smaller x: (i, j) has X=first, (j, i) X=second.
        for idx in group:
            wi = x[idx]
            le = tree.prefix(ry[idx] + 1)
            lt = tree.prefix(ry[idx])
            table[0, 0] += wi * le
            table[0, 1] += wi * (total_before - le)
            table[1, 0] += wi * (total_before - lt)
            table[1, 1] += wi * lt
        # Pairs inside the x-tie group: both orders have X=first.
        if j - i > 1:
            gw = x[group]
            gy = ry[group]
            gorder = np.argsort(gy, kind="stable")
            gw_sorted = gw[gorder]
            gy_sorted = gy[gorder]
            gtotal = gw_sorted.sum()
            k = 0
            below = 0.0
            while k < len(group):
                l = k
                while l < len(group) and gy_sorted[l] == gy_sorted[k]:
                    l += 1
                eq = gw_sorted[k:l].sum()
                for t in range(k, l):
                    wi = gw_sorted[t]
                    le_own = below + (eq - wi)
                    table[0, 0] += wi * le_own
                    table[0, 1] += wi * (gtotal - wi - le_own)
                below += eq
                k = l
        for idx in group:
            tree.add(ry[idx], x[idx])
            total_before += x[idx]
        i = j
    return table


def _table_nmi(table: np.ndarray) -> tuple[float, bool]:
    total = table.sum()
    if total <= 0:
        return 1.0, True
    p = table / total
    px = p.sum(axis=1)
    py = p.sum(axis=0)
    hx = -_plogp(px).sum()
    hy = -_plogp(py).sum()
    if hx == 0.0 and hy == 0.0:
        return 1.0, True
    outer = np.outer(px, py)
    mask = p > 0
    info = float((p[mask] * np.log2(p[mask] / outer[mask])).sum())
    return max(0.0, min(1.0, info / max(hx, hy))), False


def rank_order_nmi(pi_x, pi_y, *, samples: int | None = None,
                   seed: int | None = None) -> float:
    """Mutual information between pairwise rank orders, normalized to [0, 1].

    Draws ordered node pairs (i, j) with probability proportional to
    ``pi_x[i] * pi_x[j]`` (self-pairs excluded) and compares the binary
    outcomes "which of the pair ranks higher" under the two rankings; ties
    count as the first element ranking higher in both. ``samples=None``
    evaluates the exact pair sum; otherwise ``samples`` pairs are drawn
    with replacement using ``seed``. When both outcome entropies vanish
    (fully tied or degenerate rankings) the score is 1 by convention.
    """
    x = np.asarray(pi_x, dtype=np.float64)
    y = np.asarray(pi_y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("rank vectors must be 1-d and equally long")
    if x.size < 2:
        return 1.0
    if np.any(x < 0):
        raise ValueError("pair-sampling weights must be non-negative")
    if samples is None:
        if x.size <= _DENSE_PAIR_LIMIT:
            table = _pair_table_dense(x, y)
        else:
            table = _pair_table_sweep(x, y)
    else:
        if samples < 1:
            raise ValueError("samples must be >= 1")
        if np.count_nonzero(x) < 2:
            return 1.0  # no drawable off-diagonal pair: degenerate
        rng = np.random.default_rng(seed)
        p = x / x.sum()
        table = np.zeros((2, 2))
        remaining = samples
        while remaining > 0:
            ii = rng.choice(x.size, size=remaining, p=p)
            jj = rng.choice(x.size, size=remaining, p=p)
            ok = ii != jj
            ii, jj = ii[ok], jj[ok]
            xf = (x[ii] >= x[jj]).astype(np.int64)
            yf = (y[ii] >= y[jj]).astype(np.int64)
            np.add.at(table, (1 - xf, 1 - yf), 1.0)
            remaining -= int(ok.sum())
    score, _ = _table_nmi(table)
    return score


def _partition_nmi_terms(p_x: Partition, p_y: Partition, weights=None):
    if p_x.n != p_y.n:
        raise ValueError("partitions must cover the same node set")
    if weights is None:
        w = np.full(p_x.n, 1.0 / p_x.n)
    else:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (p_x.n,):
            raise ValueError("weights length must equal the node count")
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        total = w.sum()
        if total <= 0:
            raise ValueError("weights must have positive total mass")
        w = w / total
    kx, ky = p_x.n_modules, p_y.n_modules
    joint = np.bincount(p_x.modules * ky + p_y.modules, weights=w,
                        minlength=kx * ky).reshape(kx, ky)
    sx = joint.sum(axis=1)
    sy = joint.sum(axis=0)
    hx = -_plogp(sx).sum()
    hy = -_plogp(sy).sum()
    if hx == 0.0 and hy == 0.0:
        return 1.0, hx, hy
    outer = np.outer(sx, sy)
    mask = joint > 0
    info = float((joint[mask] * np.log2(joint[mask] / outer[mask])).sum())
    return max(0.0, min(1.0, info / max(hx, hy))), hx, hy


def partition_nmi(p_x: Partition, p_y: Partition, weights=None) -> float:
    """Normalized mutual information between partitions under node weights.

    ``weights`` is the visit-rate vector of the reference ranking (uniform
    when omitted); module masses are its sums over modules. Normalization
    is by the larger module entropy. Two single-module partitions score 1
    by convention.
    """
    score, _, _ = _partition_nmi_terms(p_x, p_y, weights)
    return score


@dataclass(frozen=True)
class RankComparison:
    """Bundle of ranking similarity scores."""

    cosine: float
    rank_order_nmi: float
    exact: bool
    samples: int | None = None
    seed: int | None = None
    degenerate: bool = False


@dataclass(frozen=True)
class PartitionComparison:
    """Partition similarity score with degeneracy flag."""

    nmi: float
    weighted: bool
    degenerate: bool = False


def compare_rankings(pi_x, pi_y, *, samples: int | None = None,
                     seed: int | None = None) -> RankComparison:
    """Cosine and rank-order scores for two aligned visit-rate vectors."""
    x = np.asarray(pi_x, dtype=np.float64)
    y = np.asarray(pi_y, dtype=np.float64)
    cos = cosine_similarity(x, y)
    if samples is None:
        if x.size <= _DENSE_PAIR_LIMIT:
            table = _pair_table_dense(x, y)
        else:
            table = _pair_table_sweep(x, y)
        score, degenerate = _table_nmi(table)
        return RankComparison(cosine=cos, rank_order_nmi=score, exact=True,
                              degenerate=degenerate)
    score = rank_order_nmi(x, y, samples=samples, seed=seed)
    return RankComparison(cosine=cos, rank_order_nmi=score, exact=False,
                          samples=samples, seed=seed)


def compare_partitions(p_x: Partition, p_y: Partition, weights=None) -> PartitionComparison:
    """Weighted partition NMI with a flag for the all-degenerate case."""
    score, hx, hy = _partition_nmi_terms(p_x, p_y, weights)
    return PartitionComparison(nmi=score, weighted=weights is not None,
                               degenerate=hx == 0.0 and hy == 0.0)
