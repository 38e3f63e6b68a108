"""Stationary visit rates of teleporting random walks via power iteration.

Four schemes are supported, combining the teleport target (``node``:
uniform preference; ``link``: strength-proportional preference) with the
recording convention (``recorded``: every step counts toward visit rates;
``unrecorded``: only steps along links count).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph

__all__ = ["TeleportConfig", "RankVector", "ConvergenceError", "preference_vector",
           "stationary", "stationary_recorded", "stationary_unrecorded"]

SCHEMES = ("node", "link")
RECORDINGS = ("recorded", "unrecorded")


class ConvergenceError(RuntimeError):
    """Power iteration failed to reach the requested tolerance."""


@dataclass(frozen=True)
class TeleportConfig:
    """Walk parameters: link-following probability and scheme selection.

    ``alpha`` is the probability of following a link per step; ``1 - alpha``
    is the teleportation rate. ``alpha = 1`` is rejected because the
    stationary solution is then not guaranteed to be unique.
    """

    alpha: float = 0.85
    scheme: str = "node"
    recording: str = "recorded"
    tol: float = 1e-12
    max_iter: int = 10_000

    def __post_init__(self):
        if not (0.0 <= self.alpha < 1.0):
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.recording not in RECORDINGS:
            raise ValueError(
                f"recording must be one of {RECORDINGS}, got {self.recording!r}")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")

    @property
    def teleport_rate(self) -> float:
        return 1.0 - self.alpha

    @classmethod
    def from_teleport_rate(cls, rate: float, **kwargs) -> "TeleportConfig":
        return cls(alpha=1.0 - rate, **kwargs)


@dataclass(frozen=True)
class RankVector:
    """Stationary visit-rate distribution with solver provenance."""

    pi: np.ndarray
    alpha: float
    scheme: str
    recording: str
    iterations: int
    residual: float
    converged: bool

    def __post_init__(self):
        self.pi.setflags(write=False)

    @property
    def teleport_rate(self) -> float:
        return 1.0 - self.alpha


def preference_vector(g: Graph, scheme: str) -> np.ndarray:
    """Teleport landing distribution for a scheme.

    ``node``: uniform 1/N. ``link``: in-strength proportional, w_in / W
    (equivalent to teleporting onto a link chosen by weight and landing at
    its head). ``link-out``: out-strength proportional, w_out / W (landing
    at a link's tail; used by the unrecorded link scheme).
    """
    if scheme == "node":
        if g.n == 0:
            raise ValueError("node preference undefined for an empty graph")
        return np.full(g.n, 1.0 / g.n)
    if scheme in ("link", "link-out"):
        if g.total_weight <= 0:
            raise ValueError(f"{scheme!r} preference undefined for an edgeless graph")
        strengths = g.w_in if scheme == "link" else g.w_out
        return strengths / g.total_weight
    raise ValueError(f"unknown preference scheme {scheme!r}")


def config_preference(g: Graph, cfg: TeleportConfig) -> np.ndarray:
    """Preference vector implied by a (scheme, recording) pair.

    Recorded link teleportation lands walkers proportionally to in-strength;
    unrecorded link teleportation lands them proportionally to out-strength
    (they then follow a link before the next visit is counted).
    """
    if cfg.scheme == "node":
        return preference_vector(g, "node")
    return preference_vector(g, "link" if cfg.recording == "recorded" else "link-out")


def stationary_recorded(g: Graph, cfg: TeleportConfig) -> RankVector:
    """Stationary distribution counting every step (links and teleports).

    Solves pi = alpha * T' pi + (1 - alpha) * v by power iteration, where
    T' is the column-stochastic transition matrix with dangling columns
    replaced by the preference vector v. Iteration starts from v and stops
    when the L1 change drops below ``cfg.tol``. On non-convergence the last
    iterate is returned with ``converged=False``.
    """
    v = config_preference(g, cfg)
    P = g.transition_matrix()
    dang = g.dangling_indices
    alpha = cfg.alpha
    x = v.copy()
    residual = np.inf
    iterations = 0
    for iterations in range(1, cfg.max_iter + 1):
        dangling_mass = x[dang].sum()
        x_new = alpha * (P @ x + dangling_mass * v) + (1.0 - alpha) * v
        x_new /= x_new.sum()
        residual = float(np.abs(x_new - x).sum())
        x = x_new
        if residual <= cfg.tol:
            break
    return RankVector(pi=x, alpha=alpha, scheme=cfg.scheme, recording="recorded",
                      iterations=iterations, residual=residual,
                      converged=residual <= cfg.tol)


def stationary_unrecorded(g: Graph, cfg: TeleportConfig) -> RankVector:
    """Stationary distribution counting only steps along links.

    Computed by solving the corresponding recorded process (whose
    preference vector is uniform for the node scheme and out-strength
    proportional for the link scheme) and then applying one extra step
    without teleportation. Teleport steps, including the forced teleport
    off dangling nodes, leave no trace, so the extra step propagates mass
    only through actual links and the result is renormalized over the
    link-arrival rate.
    """
    stage = stationary_recorded(g, cfg)
    P = g.transition_matrix()
    u = P @ stage.pi
    total = u.sum()
    if total <= 0:
        raise ValueError("unrecorded visit rates undefined: the walk records no "
                         "link steps (edgeless graph)")
    pi = u / total
    return RankVector(pi=pi, alpha=cfg.alpha, scheme=cfg.scheme,
                      recording="unrecorded", iterations=stage.iterations,
                      residual=stage.residual, converged=stage.converged)


def stationary(g: Graph, cfg: TeleportConfig) -> RankVector:
    """Stationary visit rates under the configured scheme and recording."""
    if cfg.recording == "recorded":
        return stationary_recorded(g, cfg)
    return stationary_unrecorded(g, cfg)
