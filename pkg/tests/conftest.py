"""Shared graph builders for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from teleportrank import Graph


def random_graph(seed: int, max_nodes: int = 100) -> Graph:
    """Random weighted directed graph with dangling nodes and leaves.

    Out-degrees are Poisson(2), so some nodes have no out-links (dangling);
    targets are drawn uniformly, so some nodes get no in-links (leaves).
    Weights are continuous, which keeps visit rates generically tie-free.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(5, max_nodes + 1))
    src, dst, w = [], [], []
    targets = rng.integers(0, n, size=n)  # bias in-links away from some nodes
    for i in range(n):
        k = min(int(rng.poisson(2.0)), n - 1)
        if k == 0:
            continue
        choices = rng.choice(n, size=k, replace=False)
        for t in choices:
            src.append(i)
            dst.append(int(t))
            w.append(float(rng.uniform(0.1, 3.0)))
    if not src:  # ensure at least one edge
        src, dst, w = [0], [1 % n], [1.0]
    return Graph(n, src, dst, w)


def two_cycle() -> Graph:
    return Graph(2, [0, 1], [1, 0], [1.0, 1.0])


def single_link() -> Graph:
    return Graph(2, [0], [1], [1.0])


def star_in_out() -> Graph:
    # hub 0 points to 1 and 2; both point back
    return Graph(3, [0, 0, 1, 2], [1, 2, 0, 0], [1.0, 1.0, 1.0, 1.0])


def two_disconnected_cycles() -> Graph:
    return Graph(4, [0, 1, 2, 3], [1, 0, 3, 2], [1.0] * 4)


def clique4_undirected() -> Graph:
    src, dst = [], []
    for i in range(4):
        for j in range(4):
            if i != j:
                src.append(i)
                dst.append(j)
    return Graph(4, src, dst, [1.0] * len(src))


def undirected_graph(seed: int, n: int = 30) -> Graph:
    """Every edge paired with its reverse at equal weight."""
    rng = np.random.default_rng(seed)
    src, dst, w = [], [], []
    for i in range(n):
        for j in rng.choice(n, size=3, replace=False):
            if i < j:
                weight = float(rng.uniform(0.2, 2.0))
                src += [i, int(j)]
                dst += [int(j), i]
                w += [weight, weight]
    if not src:
        src, dst, w = [0, 1], [1, 0], [1.0, 1.0]
    # connect stragglers so no node is isolated
    present = set(src) | set(dst)
    for i in range(n):
        if i not in present:
            j = (i + 1) % n
            src += [i, j]
            dst += [j, i]
            w += [1.0, 1.0]
    return Graph(n, src, dst, w)


def eulerian_graph(seed: int, n: int = 25) -> Graph:
    """Superposition of random directed cycles: in-strength = out-strength."""
    rng = np.random.default_rng(seed)
    src, dst, w = [], [], []
    for _ in range(6):
        length = int(rng.integers(3, n + 1))
        cycle = rng.permutation(n)[:length]
        weight = float(rng.uniform(0.5, 2.0))
        for a, b in zip(cycle, np.roll(cycle, -1)):
            src.append(int(a))
            dst.append(int(b))
            w.append(weight)
    return Graph(n, src, dst, w)


def mean_field_graph(seed: int, n: int = 12) -> Graph:
    """Dense graph with W[i, j] = w_in[i] * w_out[j] / W."""
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.5, 2.0, size=n)
    b = rng.uniform(0.5, 2.0, size=n)
    b *= a.sum() / b.sum()  # equal totals
    total = a.sum()
    src, dst, w = [], [], []
    for j in range(n):
        for i in range(n):
            src.append(j)
            dst.append(i)
            w.append(a[i] * b[j] / total)
    return Graph(n, src, dst, w)


@pytest.fixture(scope="session")
def graph_battery():
    """The 50 seeded random graphs used by the oracle-equivalence tests."""
    return [random_graph(seed) for seed in range(50)]
