"""Monte Carlo conditional expectations and projection classification.

The randomness of a transform is independent of its input, so
``E[tf(X) | X = prefix]`` is estimated by averaging ``tf(prefix)`` over
fresh substreams while the prefix is held fixed.  Samples are drawn in
fixed-size chunks, one substream per chunk, and chunk moments are merged
with the pairwise update of Chan, Golub and LeVeque, which makes the
result independent of the order in which chunks are combined.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .grid import Path
from .streams import as_source
from .transforms import StochasticTransform

__all__ = [
    "CHUNK_SIZE",
    "Moments",
    "CondExpEstimate",
    "Label",
    "ProjectionVerdict",
    "cond_expectation",
    "cond_lp_norm",
    "classify_projection",
    "boundedness_probe",
    "ks_statistic",
    "ks_critical",
    "law_consistency_check",
    "LawCheckReport",
]

CHUNK_SIZE = 16384
KS_COEFF_05 = 1.36


@dataclass
class Moments:
    """Count, mean and centred sum of squares of a stream of samples."""

    count: int = 0
    mean: np.ndarray | float = 0.0
    m2: np.ndarray | float = 0.0

    @classmethod
    def of(cls, x: np.ndarray) -> "Moments":
        x = np.asarray(x, dtype=float)
        mean = x.mean(axis=0)
        return cls(x.shape[0], mean, ((x - mean) ** 2).sum(axis=0))

    def merge(self, other: "Moments") -> "Moments":
        if self.count == 0:
            return other
        if other.count == 0:
            return self
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.count / n)
        m2 = self.m2 + other.m2 + delta ** 2 * (self.count * other.count / n)
        return Moments(n, mean, m2)

    @property
    def std_error(self):
        if self.count < 2:
            raise ValueError("standard error needs at least two samples")
        return np.sqrt(self.m2 / (self.count - 1) / self.count)


@dataclass(frozen=True)
class CondExpEstimate:
    """Sample mean with standard error ``stdev / sqrt(samples)``.

    ``mean`` and ``std_error`` are floats for scalar outputs and arrays of
    shape ``(Q,)`` for weight-vector outputs.
    """

    mean: float | np.ndarray
    std_error: float | np.ndarray
    samples: int

    def to_dict(self) -> dict:
        return {"mean": _jsonable(self.mean), "std_error": _jsonable(self.std_error),
                "samples": self.samples}


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return [float(x) for x in v.ravel()]
    return float(v)


def _scalarize(v):
    v = np.asarray(v, dtype=float)
    return float(v) if v.ndim == 0 else v


def _projection_samples(tf: StochasticTransform, prefix: Path, n: int, src, g=None):
    """Yield chunks of projection outputs, shape ``(m, *state)``."""
    if not tf.target.is_singleton:
        raise ValueError("conditional expectation needs a projection (singleton target window)")
    if prefix.window != tf.source:
        raise ValueError(f"prefix window {prefix.window!r} does not match transform source {tf.source!r}")
    if n < 2:
        raise ValueError("n must be >= 2")
    src = as_source(src)
    for c, start in enumerate(range(0, n, CHUNK_SIZE)):
        m = min(CHUNK_SIZE, n - start)
        out = tf.sample(prefix, src.child("chunk", c), m)[:, 0]
        yield out if g is None else g(out)


def cond_expectation(tf: StochasticTransform, prefix: Path, n: int, src,
                     g: Callable | None = None) -> CondExpEstimate:
    """Estimate ``E[g(tf(prefix))]`` from ``n`` replicas (``g`` defaults to identity)."""
    acc = Moments()
    for chunk in _projection_samples(tf, prefix, n, src, g):
        acc = acc.merge(Moments.of(chunk))
    return CondExpEstimate(_scalarize(acc.mean), _scalarize(acc.std_error), acc.count)


def cond_lp_norm(tf: StochasticTransform, g: Callable, prefix: Path, p: float, n: int, src):
    """``(E[g(tf(prefix))^p])^(1/p)`` estimated from ``n`` replicas; ``g`` must be >= 0."""
    if not p >= 1:
        raise ValueError(f"Lp norm needs p >= 1, got {p}")
    est = cond_expectation(tf, prefix, n, src, g=lambda y: np.power(g(y), p))
    return _scalarize(np.power(est.mean, 1.0 / p))


class Label(str, enum.Enum):
    SUPERMARTINGALE = "Supermartingale"
    SUBMARTINGALE = "Submartingale"
    MARTINGALE_CONSISTENT = "MartingaleConsistent"
    INDETERMINATE = "Indeterminate"


def _label(mean: float, se: float, ref: float, z: float) -> Label:
    if mean + z * se < ref:
        return Label.SUPERMARTINGALE
    if mean - z * se > ref:
        return Label.SUBMARTINGALE
    if abs(mean - ref) <= z * se:
        return Label.MARTINGALE_CONSISTENT
    return Label.INDETERMINATE


@dataclass(frozen=True)
class ProjectionVerdict:
    """Outcome of :func:`classify_projection`.

    ``strict`` is true when the label is a super/sub-martingale, i.e. the
    inequality holds with a margin beyond ``z * std_error``.  For
    weight-vector paths ``components`` holds one label per component and
    ``label`` is their common value, or ``Indeterminate`` if they disagree.
    """

    label: Label
    estimate: CondExpEstimate
    reference: float | np.ndarray
    z: float
    strict: bool
    components: tuple = field(default=())

    def to_dict(self) -> dict:
        out = {"label": self.label.value, "mean": _jsonable(self.estimate.mean),
               "std_error": _jsonable(self.estimate.std_error),
               "reference": _jsonable(self.reference), "z": float(self.z),
               "strict": self.strict, "samples": self.estimate.samples}
        if self.components:
            out["components"] = [c.value for c in self.components]
        return out


def classify_projection(tf: StochasticTransform, prefix: Path, n: int, z: float = 3.0,
                        src=0) -> ProjectionVerdict:
    """Label ``tf`` at ``prefix`` against the prefix's terminal value ``X_r``."""
    if not z >= 0:
        raise ValueError("z must be >= 0")
    est = cond_expectation(tf, prefix, n, src)
    ref = prefix.terminal
    if prefix.is_weight:
        comps = tuple(_label(float(m), float(s), float(r), z)
                      for m, s, r in zip(est.mean, est.std_error, ref))
        label = comps[0] if len(set(comps)) == 1 else Label.INDETERMINATE
    else:
        comps = ()
        label = _label(est.mean, est.std_error, ref, z)
    strict = label in (Label.SUPERMARTINGALE, Label.SUBMARTINGALE)
    return ProjectionVerdict(label, est, ref, float(z), strict, comps)


@dataclass(frozen=True)
class BoundednessReport:
    sup_abs_mean: float
    prefixes: int


def boundedness_probe(tf: StochasticTransform, bound_B: float, n_prefixes: int, n: int, src,
                      sampler: Callable | None = None) -> BoundednessReport:
    """Largest ``|E[tf(x)]|`` over sampled prefixes ``x`` with ``sup|x| <= B``.

    ``sampler(rng)`` returns a path over ``tf.source``; the default draws
    scalar values uniformly from ``[-B, B]``.
    """
    src = as_source(src)
    rng = src.child("prefixes").rng()
    if sampler is None:
        def sampler(rng):
            return Path(tf.source, rng.uniform(-bound_B, bound_B, len(tf.source)))
    sup = 0.0
    for i in range(n_prefixes):
        x = sampler(rng)
        if np.max(np.abs(x.values)) > bound_B:
            raise ValueError("sampler produced a prefix outside the bound")
        est = cond_expectation(tf, x, n, src.child("estimate", i))
        sup = max(sup, float(np.max(np.abs(est.mean))))
    return BoundednessReport(sup, n_prefixes)


def ks_statistic(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic ``sup_x |F_a(x) - F_b(x)|``."""
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    if a.size == 0 or b.size == 0:
        raise ValueError("KS statistic needs nonempty samples")
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_critical(n: int, m: int | None = None, coeff: float = KS_COEFF_05) -> float:
    """Asymptotic two-sample critical value, ``1.36 * sqrt((n + m) / (n m))`` at alpha = 0.05."""
    m = n if m is None else m
    return coeff * math.sqrt((n + m) / (n * m))


@dataclass(frozen=True)
class LawCheckReport:
    ks_stat: float
    critical: float
    passed: bool

    def to_dict(self) -> dict:
        return {"ks_stat": self.ks_stat, "critical": self.critical, "pass": self.passed}


def law_consistency_check(process, family: StochasticTransform, prefix: Path, u: float,
                          n: int, src) -> LawCheckReport:
    """KS comparison of ``X_u | prefix`` under ``process`` with ``family(prefix)``."""
    if not callable(getattr(process, "continuation", None)):
        raise TypeError(f"process {process!r} does not support conditional continuation")
    grid = prefix.window.grid
    grid.index(u)
    if not u > prefix.window.t:
        raise ValueError("u must be later than the prefix end")
    if family.target.t != u or not family.target.is_singleton:
        raise ValueError("family member must project onto the single time u")
    if prefix.is_weight:
        raise ValueError("law-consistency check supports scalar paths")
    src = as_source(src)
    cont = process.continuation(prefix, u, n, src.child("process"))
    fam = family.sample(prefix, src.child("family"), n)[:, 0]
    stat = ks_statistic(cont, fam)
    crit = ks_critical(n)
    return LawCheckReport(stat, crit, stat < crit)
