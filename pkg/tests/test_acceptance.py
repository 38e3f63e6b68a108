"""Acceptance suite: one test per release criterion, each printing a verdict.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
PASS lines. Tolerances are fixed here, not calibrated at runtime.
"""

import time

import numpy as np
import pytest

from teleportrank import (BenchmarkParams, Partition, TeleportConfig, build_flow,
                          codelength, cosine_similarity, dense_stationary,
                          optimize_partition, partition_nmi, phase_diagram,
                          planted_partition_graph, rank_order_nmi, robustness_sweep,
                          simulate_walker, stationary, stationary_recorded,
                          taylor_stationary)
from teleportrank.teleport import config_preference

from conftest import (eulerian_graph, mean_field_graph, two_disconnected_cycles,
                      undirected_graph)

CONFIG_GRID = [("node", "recorded"), ("link", "recorded"),
               ("node", "unrecorded"), ("link", "unrecorded")]
ALPHAS = (0.05, 0.5, 0.85, 0.99)
FIVE_ALPHAS = (0.05, 0.15, 0.5, 0.85, 0.95)
RATE_GRID = [round(0.1 * k, 2) for k in range(1, 10)]


def _report(number: int, name: str, ok: bool, detail: str = ""):
    verdict = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {number:2d} {name}: {verdict}" + (f" ({detail})" if detail else ""))
    assert ok, f"criterion {number} ({name}) failed: {detail}"


@pytest.fixture(scope="module")
def phase_data():
    """Shared 5-seed phase diagram over mu in {0.2, 0.6}, both recordings."""
    return phase_diagram([0.2, 0.6], RATE_GRID, recordings=("recorded", "unrecorded"),
                         seeds=5, scheme="node", master_seed=2024, passes=10)


def _mean_nmi(rows, mu, recording):
    out = {}
    for rate in RATE_GRID:
        vals = [r["nmi_vs_planted"] for r in rows
                if r["mu"] == mu and r["recording"] == recording
                and r["teleport_rate"] == rate and "error" not in r]
        assert len(vals) == 5
        out[rate] = float(np.mean(vals))
    return out


def _transition(means):
    rates = sorted(means)
    above = [r for r in rates if means[r] >= 0.5]
    below = [r for r in rates if means[r] < 0.5 and (not above or r > above[-1])]
    if not above:
        return rates[0] - 0.05
    if not below:
        return rates[-1] + 0.05
    return 0.5 * (above[-1] + below[0])


def test_criterion_01_oracle_equivalence(graph_battery):
    t0 = time.time()
    worst = 0.0
    for g in graph_battery:
        for scheme, recording in CONFIG_GRID:
            for alpha in ALPHAS:
                cfg = TeleportConfig(alpha=alpha, scheme=scheme, recording=recording)
                v = config_preference(g, cfg)
                gap = np.abs(stationary_recorded(g, cfg).pi
                             - dense_stationary(g, v, alpha)).sum()
                worst = max(worst, gap)
    elapsed = time.time() - t0
    _report(1, "oracle equivalence", worst < 1e-9 and elapsed < 60,
            f"max L1 gap {worst:.2e}, {elapsed:.1f}s")


def test_criterion_02_taylor_bound(graph_battery):
    worst_excess = -np.inf
    converged = True
    for g in graph_battery:
        for scheme, recording in CONFIG_GRID:
            for alpha in ALPHAS:
                v = config_preference(
                    g, TeleportConfig(alpha=alpha, scheme=scheme, recording=recording))
                exact = dense_stationary(g, v, alpha)
                last = None
                for order in (0, 3, 10, 30):
                    partial, bound = taylor_stationary(g, v, alpha, order)
                    err = np.abs(partial - exact).sum()
                    worst_excess = max(worst_excess, err - bound)
                    last = err
                if alpha <= 0.85 and last > 2 * alpha ** 31 / (1 - alpha) + 1e-12:
                    converged = False
    _report(2, "series error within bound", worst_excess <= 1e-12 and converged,
            f"max (error - bound) = {worst_excess:.2e}")


def test_criterion_03_alpha_independence():
    worst = 0.0
    for builder in (undirected_graph, eulerian_graph, mean_field_graph):
        for seed in range(3):
            g = builder(seed)
            expected = g.w_in / g.total_weight
            for alpha in FIVE_ALPHAS:
                for recording in ("recorded", "unrecorded"):
                    cfg = TeleportConfig(alpha=alpha, scheme="link",
                                         recording=recording)
                    worst = max(worst, np.abs(stationary(g, cfg).pi - expected).sum())
    _report(3, "link-scheme rate independence", worst < 1e-9,
            f"max L1 deviation from w_in/W = {worst:.2e}")


def test_criterion_04_scheme_equivalence(graph_battery):
    worst_gap = 0.0
    worst_cos = 1.0
    worst_r = 1.0
    for g in graph_battery:
        for alpha in (0.15, 0.85):
            rec = stationary(g, TeleportConfig(alpha=alpha, scheme="link",
                                               recording="recorded")).pi
            unrec = stationary(g, TeleportConfig(alpha=alpha, scheme="link",
                                                 recording="unrecorded")).pi
            worst_gap = max(worst_gap, np.abs(rec - unrec).sum())
            worst_cos = min(worst_cos, cosine_similarity(rec, unrec))
            worst_r = min(worst_r, rank_order_nmi(rec, unrec))
    ok = worst_gap < 1e-9 and worst_cos > 1 - 1e-9 and worst_r > 1 - 1e-9
    _report(4, "recorded-link = unrecorded-link", ok,
            f"L1 {worst_gap:.2e}, cosine {worst_cos:.12f}, R {worst_r:.12f}")


def test_criterion_05_leaf_property(graph_battery):
    checked = 0
    worst = 0.0
    for g in graph_battery:
        leaves = np.flatnonzero(g.w_in == 0)
        if leaves.size == 0:
            continue
        checked += 1
        for alpha in (0.15, 0.85):
            for recording in ("recorded", "unrecorded"):
                cfg = TeleportConfig(alpha=alpha, scheme="link", recording=recording)
                worst = max(worst, float(stationary(g, cfg).pi[leaves].max()))
    _report(5, "leaves rank zero under link schemes", checked >= 10 and worst < 1e-12,
            f"{checked} graphs with leaves, max leaf rate {worst:.2e}")


def test_criterion_06_monte_carlo(graph_battery):
    total = 0
    within = 0
    for g in graph_battery[:10]:
        for scheme, recording in CONFIG_GRID:
            cfg = TeleportConfig(alpha=0.85, scheme=scheme, recording=recording)
            exact = stationary(g, cfg).pi
            res = simulate_walker(g, cfg, 10**7, seed=1000 + g.n)
            se = np.sqrt(exact * (1 - exact) / res.recorded_steps)
            agree = np.where(se > 0, np.abs(res.freq - exact) <= 3 * se,
                             res.freq == exact)
            total += agree.size
            within += int(agree.sum())
    frac = within / total
    _report(6, "walker matches closed form", frac >= 0.95,
            f"{within}/{total} node comparisons within 3 SE ({frac:.3f})")


def test_criterion_07_map_equation_identity(graph_battery):
    worst = 0.0
    for g in graph_battery[:10]:
        for scheme, recording in CONFIG_GRID:
            flow = build_flow(g, TeleportConfig(alpha=0.85, scheme=scheme,
                                                recording=recording))
            one = Partition(np.zeros(g.n, dtype=int))
            rate = flow.node_rate[flow.node_rate > 0]
            entropy = float(-(rate * np.log2(rate)).sum())
            worst = max(worst, abs(codelength(flow, one).total_bits - entropy))
    g = two_disconnected_cycles()
    flow = build_flow(g, TeleportConfig(alpha=0.85, scheme="node",
                                        recording="unrecorded"))
    planted_bits = codelength(flow, Partition([0, 0, 1, 1])).total_bits
    one_bits = codelength(flow, Partition([0, 0, 0, 0])).total_bits
    ok = worst < 1e-9 and planted_bits == pytest.approx(1.0, abs=1e-12) \
        and one_bits == pytest.approx(2.0, abs=1e-12)
    _report(7, "one-module codelength = rate entropy", ok,
            f"max gap {worst:.2e}, cycles {planted_bits:.12f}/{one_bits:.12f} bits")


def test_criterion_08_phase_diagram(phase_data):
    rows = phase_data.rows
    assert phase_data.meta["failed_cells"] == 0
    means_02 = _mean_nmi(rows, 0.2, "recorded")
    means_06 = _mean_nmi(rows, 0.6, "recorded")
    t02 = _transition(means_02)
    t06 = _transition(means_06)
    unrec_ok = True
    detail_unrec = 1.0
    for mu in (0.2, 0.6):
        means = _mean_nmi(rows, mu, "unrecorded")
        low = min(means.values())
        detail_unrec = min(detail_unrec, low)
        if low < 0.95:
            unrec_ok = False
    # statistical monotonicity of the recorded transition in the rate
    mono_ok = True
    for means in (means_02, means_06):
        seq = [means[r] for r in sorted(means)]
        mono_ok &= all(seq[k + 1] <= seq[k] + 0.05 for k in range(len(seq) - 1))
    ok = (abs(t02 - 0.6) <= 0.1) and (abs(t06 - 0.2) <= 0.1) and unrec_ok and mono_ok
    _report(8, "phase-diagram transitions", ok,
            f"transitions {t02:.2f}@mu=0.2, {t06:.2f}@mu=0.6; "
            f"min unrec mean nmi {detail_unrec:.3f}; monotone={mono_ok}")


def test_criterion_09_mixing_limits():
    mus = [0.2, 0.4, 0.6, 0.85, 0.95]
    result = phase_diagram(mus, [0.15], recordings=("unrecorded",), seeds=5,
                           scheme="node", master_seed=77, passes=10)
    ok = True
    details = []
    for mu in mus:
        vals = [r["nmi_vs_planted"] for r in result.rows if r["mu"] == mu]
        mean = float(np.mean(vals))
        details.append(f"mu={mu}: {mean:.3f}")
        if mu <= 0.6 and mean < 0.95:
            ok = False
        if mu >= 0.85 and mean > 0.1:
            ok = False
    _report(9, "mixing-limit recovery", ok, "; ".join(details))


def test_criterion_10_metric_examples():
    rng = np.random.default_rng(0)
    checks = []
    v = np.array([0.5, 0.3, 0.2])
    checks.append(abs(cosine_similarity(v, v) - 1.0) < 1e-12)
    checks.append(cosine_similarity([1, 0], [0, 1]) == 0.0)
    checks.append(abs(cosine_similarity([1, 1], [1, 0]) - 1 / np.sqrt(2)) < 1e-12)
    checks.append(abs(rank_order_nmi(v, v) - 1.0) < 1e-12)
    checks.append(abs(rank_order_nmi(v, np.array([0.1, 0.3, 0.6])) - 1.0) < 1e-12)
    x = rng.uniform(0.1, 1.0, size=100)
    x /= x.sum()
    checks.append(rank_order_nmi(x, rng.permutation(x)) < 0.05)
    planted = Partition(np.repeat(np.arange(4), 25))
    checks.append(partition_nmi(planted, planted) == 1.0)
    checks.append(partition_nmi(planted, Partition(np.zeros(100, dtype=int))) == 0.0)
    checks.append(partition_nmi(planted,
                                Partition(rng.permutation(planted.modules))) < 0.1)
    y = (x + rng.normal(0, x.std(), size=100)).clip(min=1e-9)
    exact = rank_order_nmi(x, y)
    sampled = rank_order_nmi(x, y, samples=10**6, seed=5)
    checks.append(abs(exact - sampled) < 0.02)
    _report(10, "metric examples", all(checks),
            f"{sum(checks)}/{len(checks)} checks, sampled gap "
            f"{abs(exact - sampled):.4f}")


@pytest.fixture(scope="module")
def held_out_graph():
    g, _ = planted_partition_graph(BenchmarkParams(mu=0.4, seed=314))
    return g


def test_criterion_11a_rank_size_ordering(held_out_graph):
    res = robustness_sweep(held_out_graph,
                           ["rec-node", "rec-link", "unrec-node", "unrec-link"],
                           RATE_GRID, mode="rank_size", seed=1)
    means = {}
    for tag in ("rec-node", "rec-link", "unrec-node", "unrec-link"):
        means[tag] = float(np.mean([r["similarity"] for r in res.rows
                                    if r["scheme"] == tag]))
    link = min(means["rec-link"], means["unrec-link"])
    ok = (link >= means["unrec-node"] - 0.02
          and means["unrec-node"] >= means["rec-node"] - 0.02)
    _report(11, "rank-size robustness ordering", ok,
            f"link {link:.4f} >= unrec-node {means['unrec-node']:.4f} "
            f">= rec-node {means['rec-node']:.4f}")


def test_criterion_11b_clustering_ordering(held_out_graph):
    means = {}
    for tag in ("rec-node", "unrec-node"):
        res = robustness_sweep(held_out_graph, [tag], RATE_GRID, mode="clustering",
                               repeats=5, seed=2, passes=5)
        means[tag] = float(np.mean([r["similarity"] for r in res.rows]))
    ok = means["unrec-node"] >= means["rec-node"] - 0.02
    _report(11, "clustering robustness ordering", ok,
            f"unrec {means['unrec-node']:.4f} >= rec {means['rec-node']:.4f}")
