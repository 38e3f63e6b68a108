"""Dense-solve, series and Monte Carlo cross-checks of the solvers."""

import numpy as np
import pytest

from teleportrank import (TeleportConfig, build_dense_system, dense_stationary,
                          simulate_walker, stationary, stationary_recorded,
                          taylor_stationary)
from teleportrank.teleport import config_preference

from conftest import eulerian_graph, random_graph, single_link, two_cycle

CONFIG_GRID = [("node", "recorded"), ("link", "recorded"),
               ("node", "unrecorded"), ("link", "unrecorded")]


def test_dense_single_link_hand_solved():
    g = single_link()
    pi = dense_stationary(g, np.array([0.5, 0.5]), 0.85)
    assert np.allclose(pi, [20 / 57, 37 / 57], atol=1e-12)


def test_dense_alpha_zero_returns_preference():
    g = random_graph(4)
    v = np.full(g.n, 1.0 / g.n)
    assert np.allclose(dense_stationary(g, v, 0.0), v, atol=1e-14)


def test_dense_two_cycle_uniform():
    pi = dense_stationary(two_cycle(), np.array([0.5, 0.5]), 0.85)
    assert np.allclose(pi, [0.5, 0.5], atol=1e-14)


def test_dense_system_columns_stochastic():
    g = random_graph(9)
    v = np.full(g.n, 1.0 / g.n)
    system = build_dense_system(g, v, 0.85)
    assert np.allclose(system.t_prime.sum(axis=0), 1.0, atol=1e-12)


def test_dense_cap_enforced():
    g = random_graph(2)
    with pytest.raises(ValueError, match="cap"):
        dense_stationary(g, np.full(g.n, 1.0 / g.n), 0.5, cap=g.n - 1)


def test_dense_matches_power_iteration(graph_battery):
    for g in graph_battery[:15]:
        for scheme, recording in CONFIG_GRID:
            cfg = TeleportConfig(alpha=0.85, scheme=scheme, recording=recording)
            v = config_preference(g, cfg)
            assert np.abs(dense_stationary(g, v, 0.85)
                          - stationary_recorded(g, cfg).pi).sum() < 1e-10


def test_dense_unrecorded_route(graph_battery):
    # independent route for the unrecorded rates: dense recorded-stage
    # solution pushed through one link step and renormalized
    for g in graph_battery[:15]:
        for scheme in ("node", "link"):
            cfg = TeleportConfig(alpha=0.85, scheme=scheme, recording="unrecorded")
            v = config_preference(g, cfg)
            rho = dense_stationary(g, v, 0.85)
            t = np.zeros((g.n, g.n))
            t[g.dst, g.src] = g.weight
            nonzero = g.w_out > 0
            t[:, nonzero] /= g.w_out[nonzero]
            t[:, ~nonzero] = 0.0
            u = t @ rho
            if u.sum() == 0:
                continue
            expected = u / u.sum()
            got = stationary(g, cfg).pi
            assert np.abs(expected - got).sum() < 1e-10


def test_taylor_order_zero_is_preference():
    g = random_graph(6)
    v = np.full(g.n, 1.0 / g.n)
    partial, bound = taylor_stationary(g, v, 0.85, 0)
    assert np.array_equal(partial, v)
    assert bound == pytest.approx(2 * 0.85 / 0.15)


def test_taylor_eulerian_link_preference_is_fixed_point():
    # with in-strength-proportional preference on a flow-balanced graph
    # every series term vanishes, at any truncation order
    g = eulerian_graph(1)
    v = g.w_in / g.total_weight
    for order in (1, 5, 40):
        partial, _ = taylor_stationary(g, v, 0.85, order)
        assert np.abs(partial - v).sum() < 1e-12


def test_taylor_converges_to_dense():
    rng = np.random.default_rng(11)
    n = 10
    src, dst, w = [], [], []
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < 0.5:
                src.append(i)
                dst.append(j)
                w.append(float(rng.uniform(0.5, 2.0)))
    from teleportrank import Graph

    g = Graph(n, src, dst, w)
    v = np.full(n, 1.0 / n)
    exact = dense_stationary(g, v, 0.85)
    partial, bound = taylor_stationary(g, v, 0.85, 200)
    assert np.abs(partial - exact).sum() < 1e-10


def test_taylor_error_within_bound(graph_battery):
    for g in graph_battery[:10]:
        v = np.full(g.n, 1.0 / g.n)
        exact = dense_stationary(g, v, 0.7)
        for order in (0, 1, 3, 10):
            partial, bound = taylor_stationary(g, v, 0.7, order)
            assert np.abs(partial - exact).sum() <= bound + 1e-12


def test_walker_two_cycle():
    g = two_cycle()
    cfg = TeleportConfig(alpha=0.85, scheme="node", recording="recorded")
    res = simulate_walker(g, cfg, 10**6, seed=1)
    se = res.standard_error()
    assert np.all(np.abs(res.freq - 0.5) <= 3 * se)
    assert res.recorded_steps == 10**6


def test_walker_single_link_recorded_link():
    g = single_link()
    cfg = TeleportConfig(alpha=0.85, scheme="link", recording="recorded")
    res = simulate_walker(g, cfg, 10**6, seed=2)
    assert res.freq[0] == 0.0  # leaf never visited: no in-links, no teleport mass
    assert res.freq[1] == 1.0


def test_walker_unrecorded_counts_only_link_steps():
    g = single_link()
    cfg = TeleportConfig(alpha=0.85, scheme="node", recording="unrecorded")
    res = simulate_walker(g, cfg, 10**5, seed=3)
    # every recorded arrival is a traversal of the only link, onto node 1
    assert res.freq[1] == 1.0
    assert res.recorded_steps < res.steps


def test_walker_matches_unrecorded_stationary():
    g = random_graph(31, max_nodes=20)
    cfg = TeleportConfig(alpha=0.85, scheme="link", recording="unrecorded")
    exact = stationary(g, cfg).pi
    res = simulate_walker(g, cfg, 10**6, seed=4)
    se = np.maximum(res.standard_error(), 1e-9)
    z = np.abs(res.freq - exact) / se
    assert np.mean(z <= 3.0) >= 0.95


def test_walker_seeded_reproducible():
    g = random_graph(8)
    cfg = TeleportConfig(alpha=0.5, scheme="node")
    a = simulate_walker(g, cfg, 10**4, seed=9)
    b = simulate_walker(g, cfg, 10**4, seed=9)
    assert np.array_equal(a.freq, b.freq)


def test_walker_rejects_bad_steps():
    with pytest.raises(ValueError):
        simulate_walker(two_cycle(), TeleportConfig(), 0, seed=0)
