"""Driving dynamics: Brownian motion plus sine, and multiplicative weights.

Weight dynamics multiply every component by an independent factor drawn
from a factor law at each step.  Factors are i.i.d. across time, so the
weight process is Markov and conditioning on a prefix reduces to
conditioning on its last value.  Weights are not renormalized.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .grid import Path, TimeGrid
from .laws import MEAN_ONE_TOL, Law, Uniform, require_factor_law
from .streams import as_source

__all__ = [
    "DEMO_T_MAX",
    "SUPER_LAW",
    "MARTINGALE_LAW",
    "SUB_LAW",
    "gaussian_sine_path",
    "gaussian_sine_paths",
    "multiplicative_weight_step",
    "simulate_weight_trajectory",
    "simulate_weight_ensemble",
    "WeightTrajectory",
    "MultiplicativeProcess",
    "GaussianSineProcess",
    "law_class",
]

DEMO_T_MAX = 3 * math.pi

SUPER_LAW = Uniform(0.2, 0.8)
MARTINGALE_LAW = Uniform(0.5, 1.5)
SUB_LAW = Uniform(0.9, 1.6)


def law_class(law: Law, tol: float | None = None) -> str:
    """``"super"``, ``"martingale"`` or ``"sub"`` according to the law's mean."""
    tol = MEAN_ONE_TOL if tol is None else tol
    m = law.mean
    if abs(m - 1.0) <= tol:
        return "martingale"
    return "super" if m < 1.0 else "sub"


def _demo_grid_check(grid: TimeGrid):
    if grid.inf < 0 or grid.sup > DEMO_T_MAX:
        raise ValueError("demo grid must lie within [0, 3*pi]")


def gaussian_sine_paths(grid: TimeGrid, src, n: int) -> np.ndarray:
    """``n`` samples of ``X_t = sin(t) + W_t`` on ``grid``, shape ``(n, len(grid))``.

    ``W`` starts at 0 at time 0 and has independent ``Normal(0, dt)``
    increments between consecutive grid times.
    """
    _demo_grid_check(grid)
    times = grid.times
    dt = np.diff(np.concatenate([[0.0], times]))
    z = as_source(src).rng().standard_normal((n, times.size))
    w = np.cumsum(z * np.sqrt(dt), axis=1)
    return np.sin(times) + w


def gaussian_sine_path(grid: TimeGrid, src) -> Path:
    return Path(grid.full(), gaussian_sine_paths(grid, src, 1)[0])


def _check_weights(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("weights must be a nonempty 1-D vector")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite and >= 0")
    return w


def multiplicative_weight_step(w, law: Law, src) -> np.ndarray:
    """One step ``w_q -> w_q * U_q`` with independent ``U_q ~ law``."""
    w = _check_weights(w)
    require_factor_law(law)
    return w * law.sample(as_source(src).rng(), w.shape)


@dataclass(frozen=True)
class WeightTrajectory:
    grid: TimeGrid
    weights: np.ndarray   # (len(grid), Q)

    @property
    def Q(self) -> int:
        return self.weights.shape[1]

    def as_path(self) -> Path:
        return Path(self.grid.full(), self.weights)

    def component(self, q: int) -> Path:
        return Path(self.grid.full(), self.weights[:, q])

    def to_csv(self) -> str:
        """Long-format CSV: ``time,q,value`` with 1-based ``q``."""
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["time", "q", "value"])
        for t, row in zip(self.grid.times, self.weights):
            for q, v in enumerate(row):
                wr.writerow([repr(float(t)), q + 1, repr(float(v))])
        return buf.getvalue()


def simulate_weight_trajectory(Q: int, grid: TimeGrid, law: Law, w0, src) -> WeightTrajectory:
    """Weights at ``t_0`` are ``w0``; step ``k`` uses substream ``src.child(k)``."""
    w0 = _check_weights(w0)
    if w0.size != Q:
        raise ValueError(f"w0 has {w0.size} components, expected Q={Q}")
    src = as_source(src)
    out = np.empty((len(grid), Q))
    out[0] = w0
    for k in range(1, len(grid)):
        out[k] = multiplicative_weight_step(out[k - 1], law, src.child(k))
    out.flags.writeable = False
    return WeightTrajectory(grid, out)


def simulate_weight_ensemble(Q: int, grid: TimeGrid, law: Law, w0, src, n: int) -> np.ndarray:
    """``n`` independent replicas, shape ``(n, len(grid), Q)``."""
    w0 = _check_weights(w0)
    if w0.size != Q:
        raise ValueError(f"w0 has {w0.size} components, expected Q={Q}")
    require_factor_law(law)
    u = law.sample(as_source(src).rng(), (n, len(grid) - 1, Q))
    return np.concatenate([np.broadcast_to(w0, (n, 1, Q)), w0 * np.cumprod(u, axis=1)], axis=1)


class MultiplicativeProcess:
    """Markov process ``X_{t_k} = X_{t_{k-1}} * U_k`` on a grid."""

    def __init__(self, law: Law):
        self.law = require_factor_law(law)

    def continuation(self, prefix: Path, u: float, n: int, src) -> np.ndarray:
        """``n`` draws of ``X_u`` given the prefix; shape ``(n, *state)``."""
        grid = prefix.window.grid
        steps = grid.index(u) - (prefix.window.stop - 1)
        if steps < 1:
            raise ValueError("continuation time must be later than the prefix end")
        shape = (n, steps) + prefix.state_shape
        factors = self.law.sample(as_source(src).rng(), shape)
        return prefix.values[-1] * np.prod(factors, axis=1)

    def to_dict(self) -> dict:
        return {"process": "multiplicative", "law": self.law.to_dict()}


class GaussianSineProcess:
    """``X_t = sin(t) + W_t``; given ``X_s``, ``X_u ~ X_s - sin(s) + sin(u) + N(0, u - s)``."""

    def continuation(self, prefix: Path, u: float, n: int, src) -> np.ndarray:
        if prefix.is_weight:
            raise ValueError("Gaussian-sine process is scalar")
        grid = prefix.window.grid
        grid.index(u)
        s = prefix.window.t
        if not u > s:
            raise ValueError("continuation time must be later than the prefix end")
        z = as_source(src).rng().standard_normal(n)
        return prefix.values[-1] - math.sin(s) + math.sin(u) + math.sqrt(u - s) * z

    def to_dict(self) -> dict:
        return {"process": "gaussian_sine"}
