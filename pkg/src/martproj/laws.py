"""Scalar probability laws used for factors, bumps and noise.

Factor laws (support in ``[0, inf)``) are :class:`Degenerate`,
:class:`Uniform` and :class:`LogNormal`.  :class:`Normal` is only valid
where signed draws make sense, e.g. bump sizes.

Each law exposes closed-form ``mean``, ``var`` and, for factor laws,
``mean_sqrt`` (E[sqrt U]) and ``mean_xlogx`` (E[U log U]).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

__all__ = [
    "Law",
    "Degenerate",
    "Uniform",
    "LogNormal",
    "Normal",
    "law_from_dict",
    "require_factor_law",
    "MEAN_ONE_TOL",
]

# Tolerance for deciding a factor law has unit mean (floating parameters
# such as lognormal mu = -sigma**2/2 rarely give exactly 1.0).
MEAN_ONE_TOL = 1e-12


def _xlogx(x: float) -> float:
    return 0.0 if x == 0 else x * math.log(x)


class Law:
    family: str = ""
    is_factor: bool = False

    @property
    def mean(self) -> float:
        raise NotImplementedError

    @property
    def var(self) -> float:
        raise NotImplementedError

    @property
    def is_degenerate(self) -> bool:
        return self.var == 0.0

    def sample(self, rng: np.random.Generator, size=None) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {"family": self.family, **asdict(self)}

    def negated(self) -> "Law":
        """Law of ``-X``; only meaningful for signed laws."""
        raise ValueError(f"{self.family} law cannot be negated")


@dataclass(frozen=True)
class Degenerate(Law):
    c: float

    family = "degenerate"

    def __post_init__(self):
        if not math.isfinite(self.c):
            raise ValueError("degenerate value must be finite")

    @property
    def is_factor(self):
        return self.c >= 0

    @property
    def mean(self):
        return float(self.c)

    @property
    def var(self):
        return 0.0

    def mean_sqrt(self):
        return math.sqrt(self.c)

    def mean_xlogx(self):
        return _xlogx(self.c)

    def sample(self, rng, size=None):
        return np.full(() if size is None else size, float(self.c))

    def negated(self):
        return Degenerate(-self.c)


@dataclass(frozen=True)
class Uniform(Law):
    a: float
    b: float

    family = "uniform"

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("uniform bounds must be finite")
        if self.a > self.b:
            raise ValueError(f"uniform law bounds inverted: a={self.a} > b={self.b}")
        if self.a == self.b:
            raise ValueError("uniform law needs a < b; use a degenerate law for a point mass")

    @property
    def is_factor(self):
        return self.a >= 0

    @property
    def mean(self):
        return 0.5 * (self.a + self.b)

    @property
    def var(self):
        return (self.b - self.a) ** 2 / 12.0

    def mean_sqrt(self):
        a, b = self.a, self.b
        return 2.0 * (b ** 1.5 - a ** 1.5) / (3.0 * (b - a))

    def mean_xlogx(self):
        # antiderivative of u log u is u^2 log(u)/2 - u^2/4
        def prim(u):
            return 0.5 * _xlogx(u) * u - 0.25 * u * u
        return (prim(self.b) - prim(self.a)) / (self.b - self.a)

    def sample(self, rng, size=None):
        return rng.uniform(self.a, self.b, size)

    def negated(self):
        return Uniform(-self.b, -self.a)


@dataclass(frozen=True)
class LogNormal(Law):
    """``exp(N(mu, sigma^2))``."""

    mu: float
    sigma: float

    family = "lognormal"
    is_factor = True

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma)):
            raise ValueError("lognormal parameters must be finite")
        if self.sigma < 0:
            raise ValueError("lognormal sigma must be >= 0")

    @property
    def mean(self):
        return math.exp(self.mu + 0.5 * self.sigma ** 2)

    @property
    def var(self):
        s2 = self.sigma ** 2
        return math.expm1(s2) * math.exp(2 * self.mu + s2)

    def mean_sqrt(self):
        return math.exp(0.5 * self.mu + self.sigma ** 2 / 8.0)

    def mean_xlogx(self):
        return self.mean * (self.mu + self.sigma ** 2)

    def sample(self, rng, size=None):
        return rng.lognormal(self.mu, self.sigma, size)


@dataclass(frozen=True)
class Normal(Law):
    mean_: float
    std: float

    family = "normal"

    def __post_init__(self):
        if not (math.isfinite(self.mean_) and math.isfinite(self.std)):
            raise ValueError("normal parameters must be finite")
        if self.std < 0:
            raise ValueError("normal std must be >= 0")

    @property
    def mean(self):
        return float(self.mean_)

    @property
    def var(self):
        return float(self.std) ** 2

    def sample(self, rng, size=None):
        return rng.normal(self.mean_, self.std, size)

    def negated(self):
        return Normal(-self.mean_, self.std)

    def to_dict(self):
        return {"family": "normal", "mean": self.mean_, "std": self.std}


_FAMILIES = {
    "degenerate": (Degenerate, ("c",)),
    "uniform": (Uniform, ("a", "b")),
    "lognormal": (LogNormal, ("mu", "sigma")),
    "normal": (Normal, ("mean", "std")),
}


def law_from_dict(data: dict) -> Law:
    """Build a law from ``{"family": ..., <params>}``; rejects unknown keys."""
    if not isinstance(data, dict):
        raise ValueError("law must be a JSON object")
    family = data.get("family")
    if family not in _FAMILIES:
        raise ValueError(f"unknown law family {family!r}; expected one of {sorted(_FAMILIES)}")
    cls, names = _FAMILIES[family]
    extra = sorted(set(data) - {"family", *names})
    if extra:
        raise ValueError(f"unknown parameter(s) for {family} law: {', '.join(extra)}")
    missing = [n for n in names if n not in data]
    if missing:
        raise ValueError(f"missing parameter(s) for {family} law: {', '.join(missing)}")
    args = []
    for n in names:
        v = data[n]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ValueError(f"{family} law parameter {n!r} must be a number")
        args.append(float(v))
    return cls(*args)


def require_factor_law(law: Law) -> Law:
    if not law.is_factor:
        raise ValueError(f"{law!r} is not a factor law (support must lie in [0, inf))")
    return law
