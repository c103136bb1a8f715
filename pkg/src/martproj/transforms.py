"""Random path transformations between windows of a time grid.

A transform maps a path over its ``source`` window to a path over its
``target`` window.  Its randomness is a pure function of a
:class:`~martproj.streams.RandomSource`, so ``apply(tf, x, src)`` is
reproducible bit for bit.

Every transform is split into two steps: ``_draw`` realizes the random
parameters for ``n`` replicas and ``_evaluate`` maps input values of shape
``(m, L_source, *state)`` (``m`` either 1 or ``n``) to outputs of shape
``(n, L_target, *state)``.  :meth:`StochasticTransform.apply` is the
``n = 1`` case and :meth:`StochasticTransform.sample` draws ``n`` replicas
with the input held fixed.

Composition is sequential: stage ``i`` of a :class:`Composed` chain reads
substream ``src.child(i)``.  Nested compositions are flattened and identity
stages dropped, so ``compose(c, compose(b, a))`` and
``compose(compose(c, b), a)`` are the same chain ``[a, b, c]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .grid import Path, TimeGrid, Window
from .laws import Law, law_from_dict, require_factor_law
from .streams import RandomSource, as_source

__all__ = [
    "StochasticTransform",
    "Identity",
    "Restriction",
    "Hold",
    "VerticalBump",
    "InteriorBump",
    "HorizontalStretch",
    "Multiplicative",
    "SineDemo",
    "Composed",
    "apply",
    "builtin_transform",
    "transform_from_dict",
    "compose",
    "compose_chain",
    "commutator_check",
    "invertibility_check",
    "holder_probe",
    "sup_distance",
    "CommutatorReport",
    "HolderReport",
]


def _broadcast(values: np.ndarray, n: int) -> np.ndarray:
    return np.array(np.broadcast_to(values, (n,) + values.shape[1:]))


class StochasticTransform:
    """Base class: a (possibly random) map from ``source`` paths to ``target`` paths."""

    kind = "abstract"

    def __init__(self, source: Window, target: Window):
        self.source = source
        self.target = target

    # -- subclass hooks --------------------------------------------------
    def _draw(self, src: RandomSource, n: int, state_shape: tuple):
        return None

    def _evaluate(self, values: np.ndarray, draws, n: int) -> np.ndarray:
        raise NotImplementedError

    def _params(self) -> dict:
        return {}

    def rebind(self, source: Window) -> "StochasticTransform":
        """Same operation acting on a different source window."""
        raise ValueError(f"{self.kind} transform cannot be re-targeted to another window")

    # -- public API ------------------------------------------------------
    def _check_input(self, x: Path):
        if x.window != self.source:
            raise ValueError(
                f"{self.kind} transform expects a path over {self.source!r}, got {x.window!r}")

    def apply(self, x: Path, src) -> Path:
        self._check_input(x)
        src = as_source(src)
        draws = self._draw(src, 1, x.state_shape)
        out = self._evaluate(x.values[None], draws, 1)
        return Path(self.target, out[0])

    def sample(self, x: Path, src, n: int) -> np.ndarray:
        """``n`` replicas of ``apply`` with the input fixed; shape ``(n, L_target, *state)``."""
        self._check_input(x)
        if n < 1:
            raise ValueError("n must be >= 1")
        src = as_source(src)
        draws = self._draw(src, n, x.state_shape)
        return self._evaluate(x.values[None], draws, n)

    @property
    def is_projection(self) -> bool:
        return self.target.is_singleton

    def to_dict(self) -> dict:
        return {"kind": self.kind, "source": self.source.to_dict(),
                "target": self.target.to_dict(), **self._params()}

    def __repr__(self) -> str:
        extra = ", ".join(f"{k}={v!r}" for k, v in self._params().items())
        return f"{type(self).__name__}({self.source!r} -> {self.target!r}{', ' + extra if extra else ''})"


def _scalar_only(tf: StochasticTransform, state_shape: tuple):
    if state_shape:
        raise ValueError(f"{tf.kind} transform acts on real scalar paths only")


class Identity(StochasticTransform):
    """Path-preserving transform: output equals input."""

    kind = "identity"

    def __init__(self, source: Window, target: Window | None = None):
        if target is not None and target != source:
            raise ValueError("identity transform needs target == source")
        super().__init__(source, source)

    def _evaluate(self, values, draws, n):
        return _broadcast(values, n)

    def rebind(self, source):
        return Identity(source)


class Restriction(StochasticTransform):
    """Deterministic restriction onto a sub-window of the source."""

    kind = "restriction"

    def __init__(self, source: Window, target: Window):
        if not target.issubset(source):
            raise ValueError("restriction target must be contained in the source window")
        super().__init__(source, target)
        self._lo = target.start - source.start

    def _evaluate(self, values, draws, n):
        return _broadcast(values[:, self._lo:self._lo + len(self.target)], n)


class Hold(StochasticTransform):
    """Deterministic: every target point takes the source's terminal value.

    With a singleton target ``{t}`` this is the identity-endpoint projection
    ``X_[p,r] -> X_r`` placed at time ``t``.
    """

    kind = "hold"

    def __init__(self, source: Window, target: Window):
        if target.grid != source.grid:
            raise ValueError("hold target must live on the source grid")
        super().__init__(source, target)

    def _evaluate(self, values, draws, n):
        last = values[:, -1:]
        shape = (n, len(self.target)) + values.shape[2:]
        return np.array(np.broadcast_to(last, shape))


class VerticalBump(StochasticTransform):
    """Add a random ``sign * eps`` at the terminal point only; target == source."""

    kind = "vertical_bump"

    def __init__(self, source: Window, epsilon: Law, sign: int = 1, target: Window | None = None):
        if target is not None and target != source:
            raise ValueError("vertical bump needs target == source")
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        super().__init__(source, source)
        self.epsilon = epsilon
        self.sign = sign

    def _draw(self, src, n, state_shape):
        _scalar_only(self, state_shape)
        return self.epsilon.sample(src.rng(), n)

    def _evaluate(self, values, eps, n):
        out = _broadcast(values, n)
        out[:, -1] = out[:, -1] + self.sign * eps
        return out

    def _params(self):
        return {"epsilon": self.epsilon.to_dict(), "sign": self.sign}

    def rebind(self, source):
        return VerticalBump(source, self.epsilon, self.sign)


class InteriorBump(StochasticTransform):
    """Add a random ``sign * eps`` at an interior grid time ``tau_star`` only."""

    kind = "interior_bump"

    def __init__(self, source: Window, epsilon: Law, tau_star: float, sign: int = 1,
                 target: Window | None = None):
        if target is not None and target != source:
            raise ValueError("interior bump needs target == source")
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if not source.r < tau_star < source.t:
            raise ValueError(f"tau_star={tau_star!r} must satisfy u < tau_star < t for {source!r}")
        idx = source.grid.index(tau_star)
        super().__init__(source, source)
        self.epsilon = epsilon
        self.tau_star = float(tau_star)
        self.sign = sign
        self._pos = idx - source.start

    def _draw(self, src, n, state_shape):
        _scalar_only(self, state_shape)
        return self.epsilon.sample(src.rng(), n)

    def _evaluate(self, values, eps, n):
        out = _broadcast(values, n)
        out[:, self._pos] = out[:, self._pos] + self.sign * eps
        return out

    def _params(self):
        return {"epsilon": self.epsilon.to_dict(), "tau_star": self.tau_star, "sign": self.sign}

    def rebind(self, source):
        return InteriorBump(source, self.epsilon, self.tau_star, self.sign)


class HorizontalStretch(StochasticTransform):
    """Extend ``[u, t]`` to ``[u, t + alpha]`` holding ``X_t`` on ``(t, t + alpha]``.

    The extension is given either as ``alpha`` (``t + alpha`` must be a grid
    member exactly) or as ``steps`` (number of extra grid points).
    """

    kind = "horizontal_stretch"

    def __init__(self, source: Window, alpha: float | None = None, steps: int | None = None,
                 target: Window | None = None):
        grid = source.grid
        if target is not None:
            if alpha is None and steps is None:
                steps = target.stop - source.stop
            if target.start != source.start or target.grid != grid:
                raise ValueError("stretch target must start where the source starts")
        if (alpha is None) == (steps is None):
            raise ValueError("give exactly one of alpha or steps")
        if steps is not None:
            steps = int(steps)
            if steps < 1:
                raise ValueError("stretch needs at least one extra grid point")
            stop = source.stop + steps
            if stop > len(grid):
                raise ValueError(f"stretch by {steps} step(s) extends beyond the grid")
            end = float(grid.times[stop - 1])
        else:
            if not alpha > 0:
                raise ValueError("stretch alpha must be > 0")
            end = source.t + alpha
            if end not in grid:
                raise ValueError(f"t + alpha = {end!r} is not a grid member")
        new_target = Window(grid, source.r, end)
        if target is not None and target != new_target:
            raise ValueError("target window inconsistent with the stretch length")
        super().__init__(source, new_target)
        self.alpha = None if alpha is None else float(alpha)
        self.steps = steps

    def _evaluate(self, values, draws, n):
        extra = len(self.target) - len(self.source)
        tail = np.broadcast_to(values[:, -1:], (values.shape[0], extra) + values.shape[2:])
        return _broadcast(np.concatenate([values, tail], axis=1), n)

    def _params(self):
        return {"alpha": self.alpha} if self.alpha is not None else {"steps": self.steps}

    def rebind(self, source):
        return HorizontalStretch(source, alpha=self.alpha, steps=self.steps)


class Multiplicative(StochasticTransform):
    """Multiply by independent factor draws ``U ~ law`` (one per state component).

    With a singleton target ``{t}`` (``t >= r``) the output is ``X_r * U``.
    With target == source the whole path is scaled by the same ``U``.
    """

    kind = "multiplicative"

    def __init__(self, source: Window, target: Window, law: Law):
        require_factor_law(law)
        if target.grid != source.grid:
            raise ValueError("multiplicative target must live on the source grid")
        if target != source and not (target.is_singleton and target.t >= source.t):
            raise ValueError("multiplicative target must be the source window or a single "
                             "time at or after the source end")
        super().__init__(source, target)
        self.law = law

    def _draw(self, src, n, state_shape):
        return self.law.sample(src.rng(), (n,) + tuple(state_shape))

    def _evaluate(self, values, u, n):
        if self.target == self.source and not self.target.is_singleton:
            return _broadcast(values, n) * u[:, None]
        return values[:, -1:] * u[:, None]

    def _params(self):
        return {"law": self.law.to_dict()}


class SineDemo(StochasticTransform):
    """Piecewise continuation of a source path past its end ``r``.

    For target times ``t < r`` the output copies ``X_t``; for ``t >= r`` it is
    ``X_r + sin(t) + eps * 1(tau <= t)``.  ``eps`` follows ``epsilon`` and
    ``tau`` follows ``tau_law`` or, by default, is uniform over the target
    grid points in ``[r, t_end]``.
    """

    kind = "sine_demo"

    def __init__(self, source: Window, target: Window, epsilon: Law, tau_law: Law | None = None):
        if target.grid != source.grid:
            raise ValueError("sine demo target must live on the source grid")
        if not (source.start <= target.start and target.r <= source.t <= target.t):
            raise ValueError("sine demo needs source.r <= target.r <= source.t <= target.t")
        super().__init__(source, target)
        self.epsilon = epsilon
        self.tau_law = tau_law
        times = target.times
        self._copy = int(np.searchsorted(times, source.t))  # target points strictly before r
        self._lo = target.start - source.start
        self._tail_times = times[self._copy:]

    def _draw(self, src, n, state_shape):
        _scalar_only(self, state_shape)
        eps = self.epsilon.sample(src.child("epsilon").rng(), n)
        rng = src.child("tau").rng()
        if self.tau_law is None:
            tau = self._tail_times[rng.integers(0, self._tail_times.size, n)]
        else:
            tau = self.tau_law.sample(rng, n)
        return eps, tau

    def _evaluate(self, values, draws, n):
        eps, tau = draws
        head = _broadcast(values[:, self._lo:self._lo + self._copy], n)
        t = self._tail_times[None, :]
        tail = values[:, -1:] + np.sin(t) + eps[:, None] * (tau[:, None] <= t)
        return np.concatenate([head, tail], axis=1)

    def _params(self):
        return {"epsilon": self.epsilon.to_dict(),
                "tau_law": None if self.tau_law is None else self.tau_law.to_dict()}


class Composed(StochasticTransform):
    """Sequential chain; stage ``i`` draws from substream ``i`` of the source."""

    kind = "composed"

    def __init__(self, stages: Sequence[StochasticTransform]):
        stages = list(stages)
        if len(stages) < 2:
            raise ValueError("a composed transform needs at least two stages")
        for i, (a, b) in enumerate(zip(stages, stages[1:])):
            if a.target != b.source:
                raise ValueError(
                    f"window chain mismatch between stage {i} ({a.target!r}) "
                    f"and stage {i + 1} ({b.source!r})")
        super().__init__(stages[0].source, stages[-1].target)
        self.stages = tuple(stages)

    def _draw(self, src, n, state_shape):
        return [st._draw(src.child(i), n, state_shape) for i, st in enumerate(self.stages)]

    def _evaluate(self, values, draws, n):
        for st, d in zip(self.stages, draws):
            values = st._evaluate(values, d, n)
        return values

    def to_dict(self):
        return {"kind": self.kind, "stages": [st.to_dict() for st in self.stages]}

    def __repr__(self):
        return f"Composed({list(self.stages)!r})"


def apply(tf: StochasticTransform, x: Path, src) -> Path:
    return tf.apply(x, src)


def compose_chain(stages: Sequence[StochasticTransform]) -> StochasticTransform:
    """Chain applied first-to-last; nested chains flatten and identities drop out."""
    flat: list[StochasticTransform] = []
    for i, st in enumerate(stages):
        if i and stages[i - 1].target != st.source:
            raise ValueError(
                f"window chain mismatch: {stages[i - 1].target!r} feeds {st.source!r}")
        flat.extend(st.stages if isinstance(st, Composed) else [st])
    kept = [st for st in flat if not isinstance(st, Identity)]
    if not kept:
        return flat[0]
    if len(kept) == 1:
        return kept[0]
    return Composed(kept)


def compose(outer: StochasticTransform, inner: StochasticTransform) -> StochasticTransform:
    """``outer ∘ inner``: apply ``inner`` first, then ``outer``."""
    if inner.target != outer.source:
        raise ValueError(
            f"cannot compose: inner target {inner.target!r} != outer source {outer.source!r}")
    return compose_chain([inner, outer])


# -- construction from descriptors --------------------------------------------

_LAW_KEYS = ("epsilon", "tau_law", "law")


def _build(kind: str, source: Window, target: Window | None, params: dict) -> StochasticTransform:
    params = {k: (law_from_dict(v) if k in _LAW_KEYS and isinstance(v, dict) else v)
              for k, v in params.items()}
    builders: dict[str, Callable] = {
        "identity": lambda: Identity(source, target),
        "restriction": lambda: Restriction(source, target),
        "hold": lambda: Hold(source, target),
        "vertical_bump": lambda: VerticalBump(source, target=target, **params),
        "interior_bump": lambda: InteriorBump(source, target=target, **params),
        "horizontal_stretch": lambda: HorizontalStretch(source, target=target, **params),
        "multiplicative": lambda: Multiplicative(source, target if target is not None else source,
                                                 **params),
        "sine_demo": lambda: SineDemo(source, target, **params),
    }
    if kind not in builders:
        raise ValueError(f"unknown transform kind {kind!r}; expected one of {sorted(builders)}")
    if kind in ("identity", "restriction", "hold") and params:
        raise ValueError(f"{kind} transform takes no parameters, got {sorted(params)}")
    if kind in ("restriction", "hold", "sine_demo") and target is None:
        raise ValueError(f"{kind} transform needs an explicit target window")
    try:
        return builders[kind]()
    except TypeError as exc:
        raise ValueError(f"bad parameters for {kind} transform: {exc}") from None


def builtin_transform(kind, source: Window, target: Window | None = None, **params):
    """Build a transform by kind name (or a ``{"kind": ..., ...}`` dict of parameters).

    Laws may be passed as :class:`~martproj.laws.Law` objects or their dict form.
    """
    if isinstance(kind, dict):
        params = {**{k: v for k, v in kind.items() if k != "kind"}, **params}
        kind = kind["kind"]
    return _build(kind, source, target, params)


def transform_from_dict(data: dict, grid: TimeGrid | None = None) -> StochasticTransform:
    """Inverse of :meth:`StochasticTransform.to_dict`."""
    data = dict(data)
    kind = data.pop("kind", None)
    if kind == "composed":
        return Composed([transform_from_dict(st, grid) for st in data.pop("stages")])

    def win(d):
        if grid is not None and "grid" not in d:
            return Window(grid, d["r"], d["t"])
        return Window.from_dict(d)

    source = win(data.pop("source"))
    target = data.pop("target", None)
    return _build(kind, source, None if target is None else win(target), data)


# -- structural probes ---------------------------------------------------------

@dataclass(frozen=True)
class CommutatorReport:
    equal: bool
    first_diff_time: float | None
    left: Path    # t1 ∘ t2 : t2 first
    right: Path   # t2 ∘ t1 : t1 first

    def to_dict(self) -> dict:
        from .grid import path_to_dict
        return {"equal": self.equal, "first_diff_time": self.first_diff_time,
                "left": path_to_dict(self.left), "right": path_to_dict(self.right)}


def _bind(tf: StochasticTransform, win: Window) -> StochasticTransform:
    return tf if tf.source == win else tf.rebind(win)


def _first_difference(a: Path, b: Path) -> float | None:
    na, nb = len(a.window), len(b.window)
    if a.window.start != b.window.start:
        return min(a.window.r, b.window.r)
    common = min(na, nb)
    va, vb = a.values[:common], b.values[:common]
    diff = np.flatnonzero(np.any((va != vb).reshape(common, -1), axis=1))
    if diff.size:
        return float(a.times[diff[0]])
    if na != nb:
        return float((a if na > nb else b).times[common])
    return None


def commutator_check(t1: StochasticTransform, t2: StochasticTransform, x: Path, src) -> CommutatorReport:
    """Compare ``t1(t2(x))`` against ``t2(t1(x))`` exactly.

    Each transform reads its own labelled substream (``"t1"`` / ``"t2"``)
    in both orderings, so a random bump realizes the same ``eps`` on both
    sides.  A transform whose source is not the window it receives is
    re-targeted with :meth:`StochasticTransform.rebind`.
    """
    src = as_source(src)
    s1, s2 = src.child("t1"), src.child("t2")
    try:
        a = _bind(t2, x.window).apply(x, s2)
        left = _bind(t1, a.window).apply(a, s1)
        b = _bind(t1, x.window).apply(x, s1)
        right = _bind(t2, b.window).apply(b, s2)
    except ValueError as exc:
        raise ValueError(f"orderings are not composable: {exc}") from None
    first = _first_difference(left, right)
    return CommutatorReport(first is None, first, left, right)


def invertibility_check(fwd: StochasticTransform, inv: StochasticTransform, x: Path, src) -> bool:
    """True iff ``inv(fwd(x)) == x`` exactly, both reading the same stream."""
    if inv.source != fwd.target or inv.target != fwd.source:
        raise ValueError("inverse candidate windows must mirror the forward transform")
    src = as_source(src)
    y = fwd.apply(x, src)
    return inv.apply(y, src) == x


def sup_distance(a: Path, b: Path) -> float:
    """Max pointwise absolute difference of two paths on the same window."""
    if a.window != b.window:
        raise ValueError("sup distance needs paths on the same window")
    return float(np.max(np.abs(a.values - b.values)))


@dataclass(frozen=True)
class HolderReport:
    K_hat: float
    violations: int
    skipped: int
    pairs: int


def holder_probe(tf: StochasticTransform, pair_sampler, alpha: float, n: int, src,
                 K: float | None = None) -> HolderReport:
    """Empirical Hölder constant of ``tf`` under sup distances.

    ``pair_sampler(rng)`` returns two paths over ``tf.source``.  Both members
    of a pair go through ``tf`` with the same substream.  Pairs at zero
    distance are skipped and counted; ``violations`` counts ratios above
    ``K`` when a bound is given.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    src = as_source(src)
    rng = src.child("pairs").rng()
    k_hat, violations, skipped = 0.0, 0, 0
    for i in range(n):
        x, y = pair_sampler(rng)
        d_in = sup_distance(x, y)
        if d_in == 0:
            skipped += 1
            continue
        s = src.child("transform", i)
        ratio = sup_distance(tf.apply(x, s), tf.apply(y, s)) / d_in ** alpha
        k_hat = max(k_hat, ratio)
        if K is not None and ratio > K:
            violations += 1
    return HolderReport(k_hat, violations, skipped, n)
