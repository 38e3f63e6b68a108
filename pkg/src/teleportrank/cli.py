"""Command-line interface: rank, compare, cluster, sweep, benchmark-gen.

Exit codes: 0 on success, 1 on user/input errors, 2 on numerical failure
(non-converged stationary solve). Floating-point output is printed with 12
significant digits. The teleport rate (1 - alpha) is the user-facing
parameter; ``--alpha`` is accepted as the complementary alias.
"""

from __future__ import annotations

import dataclasses
import json
import sys

import click
import numpy as np

from .benchmark import (SCHEME_TAGS, BenchmarkParams, phase_diagram,
                        planted_partition_graph, robustness_sweep)
from .graph import GraphFormatError, load_edge_list, load_pajek, write_edge_list
from .mapeq import build_flow, codelength, optimize_partition
from .metrics import Partition, compare_partitions, compare_rankings
from .teleport import ConvergenceError, TeleportConfig, stationary

DEFAULT_TELEPORT_RATE = 0.15


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _load_graph(path: str, fmt: str):
    if fmt == "auto":
        fmt = "pajek" if path.endswith(".net") else "edgelist"
    if fmt == "pajek":
        return load_pajek(path)
    return load_edge_list(path)


def _make_config(teleport_rate, alpha, scheme, recording, tol, max_iter):
    if teleport_rate is not None and alpha is not None:
        raise click.UsageError("give exactly one of --teleport-rate / --alpha")
    if teleport_rate is None and alpha is None:
        teleport_rate = DEFAULT_TELEPORT_RATE
    if alpha is None:
        alpha = 1.0 - teleport_rate
    recording = {"rec": "recorded", "unrec": "unrecorded"}[recording]
    try:
        return TeleportConfig(alpha=alpha, scheme=scheme, recording=recording,
                              tol=tol, max_iter=max_iter)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc


def _write_output(text: str, output: str | None):
    if output is None or output == "-":
        click.echo(text, nl=False)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


_common = [
    click.option("--scheme", type=click.Choice(["node", "link"]), default="node",
                 show_default=True, help="Teleport target preference."),
    click.option("--recording", type=click.Choice(["rec", "unrec"]), default="rec",
                 show_default=True,
                 help="Whether teleport steps count toward visit rates."),
    click.option("--teleport-rate", type=float, default=None,
                 help=f"Per-step teleport probability 1 - alpha "
                      f"[default: {DEFAULT_TELEPORT_RATE}]."),
    click.option("--alpha", type=float, default=None,
                 help="Link-following probability (complement of the rate)."),
    click.option("--tol", type=float, default=1e-12, show_default=True,
                 help="L1 convergence threshold of the power iteration."),
    click.option("--max-iter", type=int, default=10_000, show_default=True),
    click.option("--input-format", type=click.Choice(["auto", "edgelist", "pajek"]),
                 default="auto", show_default=True),
]


def _with_common(fn):
    for opt in reversed(_common):
        fn = opt(fn)
    return fn


@click.group()
def cli():
    """Rank and cluster directed networks under four teleportation schemes."""


@cli.command()
@click.argument("graph_file", type=click.Path())
@_with_common
@click.option("--format", "out_format", type=click.Choice(["csv", "json"]),
              default="csv", show_default=True)
@click.option("-o", "--output", default=None, help="Output path (default stdout).")
def rank(graph_file, scheme, recording, teleport_rate, alpha, tol, max_iter,
         input_format, out_format, output):
    """Write stationary visit rates sorted by rank."""
    g = _load_graph(graph_file, input_format)
    cfg = _make_config(teleport_rate, alpha, scheme, recording, tol, max_iter)
    result = stationary(g, cfg)
    if not result.converged:
        raise ConvergenceError(
            f"power iteration did not converge: residual {result.residual:.3e} "
            f"after {result.iterations} iterations (tol {cfg.tol:g})")
    pi = result.pi
    order = np.argsort(-pi, kind="stable")
    # Competition ranking: tied rates share the rank of their first member.
    sorted_pi = pi[order]
    ranks = np.zeros(g.n, dtype=np.int64)
    ranks[order] = np.searchsorted(-sorted_pi, -pi[order], side="left") + 1
    labels = g.labels()
    if out_format == "csv":
        lines = ["node,visit_rate,rank"]
        lines += [f"{labels[i]},{_fmt(pi[i])},{ranks[i]}" for i in order]
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps({
            "scheme": cfg.scheme, "recording": cfg.recording,
            "teleport_rate": cfg.teleport_rate, "iterations": result.iterations,
            "residual": result.residual,
            "ranking": [{"node": labels[i], "visit_rate": float(pi[i]),
                         "rank": int(ranks[i])} for i in order],
        }, indent=2) + "\n"
    _write_output(text, output)


def _read_ranking(path: str) -> dict[str, float]:
    rates: dict[str, float] = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        if not header.lower().startswith("node,"):
            raise GraphFormatError(f"{path}: expected a 'node,visit_rate,rank' header")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) < 2:
                raise GraphFormatError(f"{path}:{lineno}: malformed ranking row")
            rates[parts[0]] = float(parts[1])
    if not rates:
        raise GraphFormatError(f"{path}: empty ranking")
    return rates


def _read_partition(path: str):
    with open(path, encoding="utf-8") as fh:
        return Partition.from_lines(fh.read())


@cli.command()
@click.argument("kind", type=click.Choice(["ranking", "partition"]))
@click.argument("file_x", type=click.Path())
@click.argument("file_y", type=click.Path())
@click.option("--weights", default=None, type=click.Path(),
              help="Ranking file supplying node weights for partition NMI.")
@click.option("--samples", type=int, default=None,
              help="Sample this many node pairs instead of the exact pair sum.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--format", "out_format", type=click.Choice(["json", "csv"]),
              default="json", show_default=True)
@click.option("-o", "--output", default=None)
def compare(kind, file_x, file_y, weights, samples, seed, out_format, output):
    """Compare two rankings or two partitions."""
    if kind == "ranking":
        rx = _read_ranking(file_x)
        ry = _read_ranking(file_y)
        if set(rx) != set(ry):
            raise click.UsageError("rankings cover different node sets")
        nodes = list(rx)
        x = np.array([rx[k] for k in nodes])
        y = np.array([ry[k] for k in nodes])
        res = compare_rankings(x, y, samples=samples, seed=seed)
        payload = dataclasses.asdict(res)
    else:
        px, lx = _read_partition(file_x)
        py, ly = _read_partition(file_y)
        if lx != ly:
            if set(lx) != set(ly):
                raise click.UsageError("partitions cover different node sets")
            pos_y = {lbl: j for j, lbl in enumerate(ly)}
            py = Partition(py.modules[[pos_y[lbl] for lbl in lx]])
        w = None
        if weights is not None:
            rw = _read_ranking(weights)
            if set(rw) != set(lx):
                raise click.UsageError("weights ranking covers a different node set")
            w = np.array([rw[lbl] for lbl in lx])
        res = compare_partitions(px, py, weights=w)
        payload = dataclasses.asdict(res)
    if out_format == "json":
        text = json.dumps(payload, indent=2, default=float) + "\n"
    else:
        keys = list(payload)
        text = (",".join(keys) + "\n"
                + ",".join(_fmt(payload[k]) if isinstance(payload[k], float)
                           else str(payload[k]) for k in keys) + "\n")
    _write_output(text, output)


@cli.command()
@click.argument("graph_file", type=click.Path())
@_with_common
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--passes", type=int, default=10, show_default=True,
              help="Independent optimizer restarts.")
@click.option("-o", "--output", default=None, help="Partition file (default stdout).")
@click.option("--report", default=None, help="Write the codelength report JSON here.")
def cluster(graph_file, scheme, recording, teleport_rate, alpha, tol, max_iter,
            input_format, seed, passes, output, report):
    """Partition a network by minimizing the map-equation codelength."""
    g = _load_graph(graph_file, input_format)
    cfg = _make_config(teleport_rate, alpha, scheme, recording, tol, max_iter)
    flow = build_flow(g, cfg)
    part = optimize_partition(flow, seed=seed, passes=passes)
    bits = codelength(flow, part)
    _write_output(part.to_lines(g.labels()), output)
    report_obj = {
        "total_bits": bits.total_bits,
        "index_bits": bits.index_bits,
        "module_bits": bits.module_bits,
        "n_modules": bits.n_modules,
        "scheme": cfg.scheme,
        "recording": cfg.recording,
        "teleport_rate": cfg.teleport_rate,
        "seed": seed,
    }
    text = json.dumps(report_obj, indent=2, default=float) + "\n"
    if report is not None:
        _write_output(text, report)
    elif output is not None:
        click.echo(text, nl=False)


def _parse_grid(spec: str) -> list[float]:
    """Parse '0.1,0.2,0.3' or 'start:stop:step' into a float grid."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise click.UsageError("grid range must be start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise click.UsageError("grid step must be positive")
        count = int(round((stop - start) / step)) + 1
        return [round(start + i * step, 12) for i in range(count)]
    return [float(p) for p in spec.split(",") if p.strip()]


def _emit_sweep(result, out_format, output):
    if out_format == "json":
        text = json.dumps(result.to_json_obj(), indent=2, default=float) + "\n"
    else:
        import io

        buf = io.StringIO()
        result.to_csv(buf)
        text = buf.getvalue()
    _write_output(text, output)


@cli.group()
def sweep():
    """Grid experiments over teleport rates."""


@sweep.command("phase")
@click.option("--mu", "mus", type=float, multiple=True, required=True,
              help="Module mixing rates (repeatable).")
@click.option("--rates", default="0.1:0.9:0.1", show_default=True,
              help="Teleport-rate grid, list or start:stop:step.")
@click.option("--recording", type=click.Choice(["rec", "unrec", "both"]),
              default="both", show_default=True)
@click.option("--scheme", type=click.Choice(["node", "link"]), default="node",
              show_default=True)
@click.option("--seeds", type=int, default=5, show_default=True,
              help="Benchmark realizations per mu.")
@click.option("--nodes", type=int, default=1000, show_default=True)
@click.option("--s-min", type=int, default=20, show_default=True)
@click.option("--s-max", type=int, default=50, show_default=True)
@click.option("--k-out", type=float, default=7.5, show_default=True)
@click.option("--passes", type=int, default=10, show_default=True)
@click.option("--master-seed", type=int, default=0, show_default=True)
@click.option("--format", "out_format", type=click.Choice(["csv", "json"]),
              default="csv", show_default=True)
@click.option("-o", "--output", default=None)
def sweep_phase(mus, rates, recording, scheme, seeds, nodes, s_min, s_max, k_out,
                passes, master_seed, out_format, output):
    """Benchmark-recovery phase diagram over (mu, teleport rate)."""
    recs = {"rec": ("recorded",), "unrec": ("unrecorded",),
            "both": ("recorded", "unrecorded")}[recording]
    params = BenchmarkParams(n=nodes, s_min=s_min, s_max=s_max, k_out=k_out,
                             mu=mus[0], seed=0)
    result = phase_diagram(list(mus), _parse_grid(rates), recordings=recs,
                           seeds=seeds, scheme=scheme, params=params,
                           master_seed=master_seed, passes=passes)
    _emit_sweep(result, out_format, output)


@sweep.command("robustness")
@click.argument("graph_file", type=click.Path())
@click.option("--mode", type=click.Choice(["rank-size", "rank-order", "clustering"]),
              required=True)
@click.option("--schemes", default="rec-node,rec-link,unrec-node,unrec-link",
              show_default=True, help="Comma-separated scheme tags.")
@click.option("--rates", default="0.05:0.95:0.1", show_default=True)
@click.option("--reference", type=float, default=DEFAULT_TELEPORT_RATE,
              show_default=True)
@click.option("--repeats", type=int, default=10, show_default=True,
              help="Optimizer runs per rate in clustering mode.")
@click.option("--passes", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--input-format", type=click.Choice(["auto", "edgelist", "pajek"]),
              default="auto", show_default=True)
@click.option("--format", "out_format", type=click.Choice(["csv", "json"]),
              default="csv", show_default=True)
@click.option("-o", "--output", default=None)
def sweep_robustness(graph_file, mode, schemes, rates, reference, repeats, passes,
                     seed, input_format, out_format, output):
    """Similarity of results across rates against the reference rate."""
    g = _load_graph(graph_file, input_format)
    tags = [t.strip() for t in schemes.split(",") if t.strip()]
    for t in tags:
        if t not in SCHEME_TAGS:
            raise click.UsageError(f"unknown scheme tag {t!r}")
    result = robustness_sweep(g, tags, _parse_grid(rates), reference=reference,
                              mode=mode.replace("-", "_"), repeats=repeats,
                              seed=seed, passes=passes)
    _emit_sweep(result, out_format, output)


@cli.command("benchmark-gen")
@click.option("--nodes", type=int, default=1000, show_default=True)
@click.option("--s-min", type=int, default=20, show_default=True)
@click.option("--s-max", type=int, default=50, show_default=True)
@click.option("--k-out", type=float, default=7.5, show_default=True)
@click.option("--mu", type=float, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out-prefix", required=True,
              help="Writes PREFIX.edges and PREFIX.planted.")
def benchmark_gen(nodes, s_min, s_max, k_out, mu, seed, out_prefix):
    """Generate a planted-partition benchmark graph."""
    params = BenchmarkParams(n=nodes, s_min=s_min, s_max=s_max, k_out=k_out,
                             mu=mu, seed=seed)
    g, planted = planted_partition_graph(params)
    write_edge_list(g, f"{out_prefix}.edges")
    with open(f"{out_prefix}.planted", "w", encoding="utf-8") as fh:
        fh.write(planted.to_lines(g.labels()))
    click.echo(f"wrote {out_prefix}.edges ({g.n} nodes, {g.n_edges} links) and "
               f"{out_prefix}.planted ({planted.n_modules} modules)")


def main(argv=None) -> int:
    """Entry point with mapped exit codes (0 ok, 1 user error, 2 numerical)."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except ConvergenceError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        return 2
    except (GraphFormatError, OSError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
