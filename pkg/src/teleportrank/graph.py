"""Sparse weighted directed graphs with cached strengths, plus text loaders."""

from __future__ import annotations

import io
from collections.abc import Iterator

import numpy as np
from scipy import sparse

__all__ = ["Graph", "GraphFormatError", "load_edge_list", "load_pajek", "write_edge_list"]


class GraphFormatError(ValueError):
    """Input text could not be parsed into a graph."""


class Graph:
    """Immutable weighted directed graph.

    Parallel edges are merged by weight summation at construction and edges
    are stored sorted by (source, target). ``w_in[i]`` / ``w_out[i]`` hold
    the total weight of incoming / outgoing links of node ``i``; nodes with
    zero out-strength are dangling. All arrays are read-only, so instances
    are safe to share between threads.
    """

    __slots__ = ("n", "src", "dst", "weight", "w_in", "w_out", "total_weight",
                 "node_labels", "dangling_indices", "_tmat")

    def __init__(self, n: int, src, dst, weight, node_labels=None):
        n = int(n)
        src = np.ascontiguousarray(src, dtype=np.int64)
        dst = np.ascontiguousarray(dst, dtype=np.int64)
        weight = np.ascontiguousarray(weight, dtype=np.float64)
        if not (src.shape == dst.shape == weight.shape) or src.ndim != 1:
            raise ValueError("src, dst and weight must be 1-d arrays of equal length")
        if n < 0 or (n == 0 and src.size):
            raise ValueError("node count inconsistent with edge list")
        if src.size:
            if src.min() < 0 or src.max() >= n or dst.min() < 0 or dst.max() >= n:
                raise ValueError("edge endpoint out of range")
            if weight.min() <= 0:
                raise ValueError("edge weights must be positive")
            order = np.lexsort((dst, src))
            src, dst, weight = src[order], dst[order], weight[order]
            first = np.empty(src.size, dtype=bool)
            first[0] = True
            np.logical_or(src[1:] != src[:-1], dst[1:] != dst[:-1], out=first[1:])
            starts = np.flatnonzero(first)
            src, dst = src[starts], dst[starts]
            weight = np.add.reduceat(weight, starts)

        self.n = n
        self.src = src
        self.dst = dst
        self.weight = weight
        self.w_in = np.bincount(dst, weights=weight, minlength=n).astype(np.float64)
        self.w_out = np.bincount(src, weights=weight, minlength=n).astype(np.float64)
        self.total_weight = float(weight.sum())
        self.dangling_indices = np.flatnonzero(self.w_out == 0)
        for arr in (self.src, self.dst, self.weight, self.w_in, self.w_out,
                    self.dangling_indices):
            arr.setflags(write=False)
        if node_labels is not None:
            node_labels = tuple(str(x) for x in node_labels)
            if len(node_labels) != n:
                raise ValueError("node_labels length must equal node count")
        self.node_labels = node_labels
        self._tmat = None

    @property
    def n_edges(self) -> int:
        return int(self.src.size)

    @property
    def dangling(self) -> frozenset[int]:
        """Set of nodes with zero out-strength."""
        return frozenset(int(i) for i in self.dangling_indices)

    def edges(self) -> Iterator[tuple[int, int, float]]:
        """Yield merged edges as (source, target, weight)."""
        for s, t, w in zip(self.src, self.dst, self.weight):
            yield int(s), int(t), float(w)

    def label(self, i: int) -> str:
        return self.node_labels[i] if self.node_labels is not None else str(i)

    def labels(self) -> list[str]:
        return [self.label(i) for i in range(self.n)]

    def transition_matrix(self) -> sparse.csr_matrix:
        """Column-stochastic link matrix P with P[i, j] = W(j->i) / w_out[j].

        Dangling columns are all-zero; callers supply the teleport completion.
        """
        if self._tmat is None:
            data = self.weight / self.w_out[self.src]
            self._tmat = sparse.csr_matrix(
                (data, (self.dst, self.src)), shape=(self.n, self.n))
        return self._tmat

    def __repr__(self) -> str:
        return (f"Graph(n={self.n}, edges={self.n_edges}, "
                f"total_weight={self.total_weight:g}, "
                f"dangling={len(self.dangling_indices)})")


def _open_text(source):
    """Return (stream, should_close) for a path or an open text stream."""
    if hasattr(source, "read"):
        return source, False
    return open(source, "r", encoding="utf-8"), True


def load_edge_list(source, *, delimiter: str | None = None, index_base: int = 0,
                   default_weight: float = 1.0) -> Graph:
    """Load a graph from whitespace- or delimiter-separated edge lines.

    Each non-comment line reads ``source target [weight]``; the weight
    defaults to ``default_weight``. Lines starting with ``#`` and blank
    lines are skipped. If every endpoint token parses as an integer the
    node count is ``max index + 1`` after subtracting ``index_base``;
    otherwise endpoints are treated as string labels mapped to indices in
    first-appearance order.
    """
    if index_base not in (0, 1):
        raise ValueError("index_base must be 0 or 1")
    if default_weight <= 0:
        raise ValueError("default_weight must be positive")
    stream, should_close = _open_text(source)
    rows: list[tuple[int, str, str, float]] = []
    try:
        for lineno, raw in enumerate(stream, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(delimiter)
            if len(parts) not in (2, 3):
                raise GraphFormatError(
                    f"line {lineno}: expected 'source target [weight]', got {line!r}")
            if len(parts) == 3:
                try:
                    w = float(parts[2])
                except ValueError:
                    raise GraphFormatError(
                        f"line {lineno}: invalid weight {parts[2]!r}") from None
            else:
                w = default_weight
            if not np.isfinite(w) or w <= 0:
                raise GraphFormatError(f"line {lineno}: non-positive weight {w!r}")
            rows.append((lineno, parts[0], parts[1], w))
    finally:
        if should_close:
            stream.close()
    if not rows:
        raise GraphFormatError("empty input: no edges found")

    try:
        int_pairs = [(int(s), int(t)) for _, s, t, _ in rows]
    except ValueError:
        int_pairs = None

    if int_pairs is not None:
        src = np.array([s - index_base for s, _ in int_pairs], dtype=np.int64)
        dst = np.array([t - index_base for _, t in int_pairs], dtype=np.int64)
        bad = np.flatnonzero((src < 0) | (dst < 0))
        if bad.size:
            raise GraphFormatError(
                f"line {rows[bad[0]][0]}: node index below index base {index_base}")
        n = int(max(src.max(), dst.max())) + 1
        labels = None
    else:
        index: dict[str, int] = {}
        src = np.empty(len(rows), dtype=np.int64)
        dst = np.empty(len(rows), dtype=np.int64)
        for k, (_, s, t, _) in enumerate(rows):
            src[k] = index.setdefault(s, len(index))
            dst[k] = index.setdefault(t, len(index))
        n = len(index)
        labels = list(index)
    weight = np.array([w for *_, w in rows], dtype=np.float64)
    return Graph(n, src, dst, weight, node_labels=labels)


def load_pajek(source) -> Graph:
    """Load the Pajek ``.net`` subset: *Vertices, *Arcs and *Edges sections.

    Arcs are directed source->target; each *Edges line adds both directions.
    Vertex ids are 1-based; quoted vertex labels are preserved.
    """
    stream, should_close = _open_text(source)
    try:
        lines = stream.readlines()
    finally:
        if should_close:
            stream.close()

    n = None
    labels: list[str] | None = None
    saw_label = False
    src: list[int] = []
    dst: list[int] = []
    weight: list[float] = []
    section = None

    def _vertex(tok: str, lineno: int) -> int:
        try:
            v = int(tok)
        except ValueError:
            raise GraphFormatError(f"line {lineno}: invalid vertex id {tok!r}") from None
        if n is None or not (1 <= v <= n):
            raise GraphFormatError(f"line {lineno}: vertex {v} out of range 1..{n}")
        return v - 1

    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        low = line.lower()
        if low.startswith("*vertices"):
            parts = line.split()
            if len(parts) < 2:
                raise GraphFormatError(f"line {lineno}: *Vertices needs a count")
            try:
                n = int(parts[1])
            except ValueError:
                raise GraphFormatError(
                    f"line {lineno}: invalid vertex count {parts[1]!r}") from None
            if n < 0:
                raise GraphFormatError(f"line {lineno}: negative vertex count")
            labels = [str(i + 1) for i in range(n)]
            section = "vertices"
            continue
        if low.startswith("*arcs") or low.startswith("*edges"):
            if n is None:
                raise GraphFormatError(
                    f"line {lineno}: missing *Vertices header before {line.split()[0]}")
            section = "arcs" if low.startswith("*arcs") else "edges"
            continue
        if line.startswith("*"):
            raise GraphFormatError(f"line {lineno}: unsupported section {line!r}")

        if section == "vertices":
            parts = line.split(None, 1)
            i = _vertex(parts[0], lineno)
            if len(parts) > 1:
                lbl = parts[1].strip()
                if lbl.startswith('"'):
                    end = lbl.find('"', 1)
                    lbl = lbl[1:end] if end > 0 else lbl.strip('"')
                else:
                    lbl = lbl.split()[0]
                labels[i] = lbl
                saw_label = True
        elif section in ("arcs", "edges"):
            parts = line.split()
            if len(parts) < 2:
                raise GraphFormatError(f"line {lineno}: expected 'source target [weight]'")
            s = _vertex(parts[0], lineno)
            t = _vertex(parts[1], lineno)
            if len(parts) > 2:
                try:
                    w = float(parts[2])
                except ValueError:
                    raise GraphFormatError(
                        f"line {lineno}: invalid weight {parts[2]!r}") from None
            else:
                w = 1.0
            if not np.isfinite(w) or w <= 0:
                raise GraphFormatError(f"line {lineno}: non-positive weight {w!r}")
            src.append(s)
            dst.append(t)
            weight.append(w)
            if section == "edges" and s != t:
                src.append(t)
                dst.append(s)
                weight.append(w)
        else:
            raise GraphFormatError(f"line {lineno}: data before any section header")

    if n is None:
        raise GraphFormatError("missing *Vertices header")
    return Graph(n, src, dst, weight, node_labels=labels if saw_label else None)


def write_edge_list(g: Graph, target) -> None:
    """Write the merged edge list as ``source target weight`` lines.

    Weights use ``repr`` so a reload reproduces identical strengths. Labels
    are used when present and whitespace-free, otherwise integer indices.
    """
    use_labels = g.node_labels is not None and all(
        lbl and not any(c.isspace() for c in lbl) for lbl in g.node_labels)
    stream, should_close = (target, False) if hasattr(target, "write") else (
        open(target, "w", encoding="utf-8"), True)
    try:
        for s, t, w in zip(g.src, g.dst, g.weight):
            a = g.node_labels[s] if use_labels else str(int(s))
            b = g.node_labels[t] if use_labels else str(int(t))
            stream.write(f"{a} {b} {float(w)!r}\n")
    finally:
        if should_close:
            stream.close()


def edge_list_text(g: Graph) -> str:
    """Return the serialized edge list as a string."""
    buf = io.StringIO()
    write_edge_list(g, buf)
    return buf.getvalue()
