"""Planted-partition generator and sweep harnesses."""

import io

import numpy as np
import pytest

from teleportrank import (BenchmarkParams, phase_diagram, planted_partition_graph,
                          robustness_sweep)
from teleportrank.graph import edge_list_text

from conftest import undirected_graph


def test_default_size_matches_target_link_count():
    g, planted = planted_partition_graph(BenchmarkParams(mu=0.2, seed=0))
    assert g.n == 1000
    assert abs(g.n_edges - 7500) < 150
    sizes = planted.module_sizes()
    assert sizes.min() >= 20 and sizes.max() <= 50


def test_mu_zero_all_internal():
    g, planted = planted_partition_graph(
        BenchmarkParams(n=200, s_min=10, s_max=20, k_out=5.0, mu=0.0, seed=1))
    mods = planted.modules
    assert np.all(mods[g.src] == mods[g.dst])


def test_mu_one_mostly_external():
    g, planted = planted_partition_graph(
        BenchmarkParams(n=200, s_min=30, s_max=40, k_out=5.0, mu=1.0, seed=1))
    mods = planted.modules
    internal = np.mean(mods[g.src] == mods[g.dst])
    assert internal < 0.02


def test_within_community_fraction_tracks_mu():
    for mu in (0.2, 0.5, 0.8):
        g, planted = planted_partition_graph(BenchmarkParams(mu=mu, seed=3))
        mods = planted.modules
        internal = np.mean(mods[g.src] == mods[g.dst])
        assert abs(internal - (1.0 - mu)) < 0.02


def test_generator_reproducible_byte_for_byte():
    params = BenchmarkParams(n=300, s_min=15, s_max=30, k_out=6.0, mu=0.3, seed=9)
    g1, p1 = planted_partition_graph(params)
    g2, p2 = planted_partition_graph(params)
    assert edge_list_text(g1) == edge_list_text(g2)
    assert p1 == p2


def test_no_self_loops_or_duplicates():
    g, _ = planted_partition_graph(
        BenchmarkParams(n=150, s_min=10, s_max=25, k_out=6.0, mu=0.4, seed=2))
    assert np.all(g.src != g.dst)
    assert np.all(g.weight == 1.0)  # duplicates would have merged to weight 2


def test_infeasible_params_rejected():
    with pytest.raises(ValueError, match="infeasible"):
        BenchmarkParams(n=100, s_min=4, s_max=8, k_out=6.0, mu=0.0)
    with pytest.raises(ValueError):
        BenchmarkParams(mu=1.5)
    with pytest.raises(ValueError):
        BenchmarkParams(s_min=30, s_max=20)


def test_phase_diagram_small_grid():
    params = BenchmarkParams(n=150, s_min=10, s_max=25, k_out=5.0, mu=0.2, seed=0)
    result = phase_diagram([0.2], [0.15, 0.85], recordings=("recorded",), seeds=1,
                           params=params, passes=4)
    assert len(result.rows) == 2
    for row in result.rows:
        assert "error" not in row
        assert 0.0 <= row["nmi_vs_planted"] <= 1.0
        assert row["codelength_onemodule_recorded"] > 0
    low = [r for r in result.rows if r["teleport_rate"] == 0.15][0]
    assert low["nmi_vs_planted"] > 0.9


def test_phase_diagram_deterministic():
    params = BenchmarkParams(n=120, s_min=10, s_max=20, k_out=5.0, mu=0.2, seed=0)
    a = phase_diagram([0.2], [0.5], recordings=("unrecorded",), seeds=1,
                      params=params, passes=2)
    b = phase_diagram([0.2], [0.5], recordings=("unrecorded",), seeds=1,
                      params=params, passes=2)
    assert a.rows == b.rows


def test_robustness_reference_point_is_one():
    g, _ = planted_partition_graph(
        BenchmarkParams(n=150, s_min=10, s_max=25, k_out=5.0, mu=0.3, seed=4))
    for mode in ("rank_size", "rank_order"):
        res = robustness_sweep(g, ["rec-node"], [0.15, 0.55], reference=0.15,
                               mode=mode)
        at_ref = [r for r in res.rows if r["teleport_rate"] == 0.15][0]
        assert at_ref["similarity"] == 1.0


def test_robustness_undirected_link_scheme_flat():
    g = undirected_graph(2, n=40)
    res = robustness_sweep(g, ["rec-link", "unrec-link"], [0.05, 0.15, 0.5, 0.95],
                           mode="rank_size")
    for row in res.rows:
        assert row["similarity"] == pytest.approx(1.0, abs=1e-9)


def test_link_schemes_give_identical_robustness_rows():
    g, _ = planted_partition_graph(
        BenchmarkParams(n=150, s_min=10, s_max=25, k_out=5.0, mu=0.3, seed=5))
    for mode in ("rank_size", "rank_order"):
        res = robustness_sweep(g, ["rec-link", "unrec-link"], [0.1, 0.5, 0.9],
                               mode=mode)
        rec = [r["similarity"] for r in res.rows if r["scheme"] == "rec-link"]
        unrec = [r["similarity"] for r in res.rows if r["scheme"] == "unrec-link"]
        assert rec == pytest.approx(unrec, abs=1e-9)


def test_robustness_clustering_mode_runs():
    g, _ = planted_partition_graph(
        BenchmarkParams(n=120, s_min=10, s_max=20, k_out=5.0, mu=0.2, seed=6))
    res = robustness_sweep(g, ["unrec-node"], [0.15, 0.85], mode="clustering",
                           repeats=2, passes=2)
    sims = {r["teleport_rate"]: r["similarity"] for r in res.rows}
    assert sims[0.15] == 1.0
    assert 0.0 <= sims[0.85] <= 1.0


def test_sweep_result_csv_round_trip():
    import csv

    g, _ = planted_partition_graph(
        BenchmarkParams(n=120, s_min=10, s_max=20, k_out=5.0, mu=0.2, seed=7))
    res = robustness_sweep(g, ["rec-node"], [0.15, 0.5], mode="rank_size")
    buf = io.StringIO()
    res.to_csv(buf)
    rows = list(csv.DictReader(io.StringIO(buf.getvalue())))
    assert len(rows) == len(res.rows)
    for parsed, original in zip(rows, res.rows):
        assert float(parsed["similarity"]) == pytest.approx(original["similarity"],
                                                            abs=1e-11)


def test_unknown_scheme_tag_rejected():
    g = undirected_graph(1, n=10)
    with pytest.raises(ValueError, match="unknown scheme tag"):
        robustness_sweep(g, ["warp-drive"], [0.15], mode="rank_size")
