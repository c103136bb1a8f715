"""Phase-homogeneous pure states, density coordinates and step certification.

A pure state is given by nonnegative weights ``pi_q`` and fixed phases
``theta_q``; its density coordinates in the observable basis are
``sqrt(pi_i pi_j) exp(i (theta_i - theta_j))``.  Weights evolve by
independent multiplicative factors (see :mod:`martproj.dynamics`), and the
functions below certify by Monte Carlo, with ``z * SE`` margins, that

* a factor law with mean <= 1 shrinks every expected off-diagonal
  magnitude below the last realized one (decoherence), and
* a factor law with mean >= 1 lifts the expected Shannon-Wiener
  information ``sum_q pi_q log pi_q`` above the last realized value.

Information gain from a mean > 1 law is only guaranteed for components
above :func:`information_gain_floor`, because ``x log x`` decreases on
``(0, 1/e)``; unit-mean laws raise the information for any weights.

Zero-variance (degenerate) laws give equalities; they are reported with
``strict=False`` and never pass.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .classifier import CondExpEstimate
from .dynamics import law_class, simulate_weight_trajectory
from .grid import TimeGrid
from .laws import Law, require_factor_law
from .streams import as_source

__all__ = [
    "PureStateSnapshot",
    "DensityView",
    "density_coordinates",
    "magnitudes",
    "shannon_wiener",
    "OffDiagEstimate",
    "expected_offdiag_step",
    "expected_information_step",
    "StepVerdict",
    "verify_decoherence_step",
    "verify_information_step",
    "verify_martingale_step",
    "TrajectoryReport",
    "run_full_trajectory",
    "information_gain_floor",
    "StepGaps",
    "step_gaps",
]


def _weights(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("weights must be a nonempty 1-D vector")
    if np.any(w < 0):
        raise ValueError("weights must be >= 0")
    if not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite")
    return w


def _xlogx(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log(x[pos])
    return out


@dataclass(frozen=True)
class PureStateSnapshot:
    weights: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        w = _weights(self.weights)
        th = np.asarray(self.phases, dtype=float)
        if th.shape != w.shape:
            raise ValueError(f"need one phase per weight, got {th.shape} vs {w.shape}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "phases", th)

    @property
    def Q(self) -> int:
        return self.weights.size

    def amplitudes(self) -> np.ndarray:
        """State vector ``sqrt(pi_q) exp(i theta_q)`` in the observable basis."""
        return np.sqrt(self.weights) * np.exp(1j * self.phases)


@dataclass(frozen=True)
class DensityView:
    coords: np.ndarray       # (Q, Q) complex
    magnitudes: np.ndarray   # (Q, Q) real


def magnitudes(weights) -> np.ndarray:
    """Matrix of ``sqrt(pi_i pi_j)``."""
    w = _weights(weights)
    return np.sqrt(np.outer(w, w))


def density_coordinates(state: PureStateSnapshot) -> DensityView:
    w, th = state.weights, state.phases
    coords = np.sqrt(np.outer(w, w)) * np.exp(1j * np.subtract.outer(th, th))
    return DensityView(coords, magnitudes(w))


def shannon_wiener(weights) -> float:
    """``sum_q pi_q ln pi_q`` in nats, with ``0 ln 0 = 0``."""
    return float(np.sum(_xlogx(_weights(weights))))


def _factor_draws(prev: np.ndarray, law: Law, n: int, src) -> np.ndarray:
    """Next-step weights, shape ``(n, Q)``; component ``q`` reads substream ``q``."""
    require_factor_law(law)
    if n < 2:
        raise ValueError("n must be >= 2")
    src = as_source(src)
    u = np.stack([law.sample(src.child(q).rng(), n) for q in range(prev.size)], axis=1)
    return prev * u


@dataclass(frozen=True)
class OffDiagEstimate:
    """MC estimates of the expected magnitude matrix one step ahead.

    ``product`` uses the factorized form ``E[sqrt pi_i] E[sqrt pi_j]``;
    ``joint`` averages ``sqrt(pi_i pi_j)`` over the same draws.
    """

    product: np.ndarray
    joint: np.ndarray
    product_se: np.ndarray
    joint_se: np.ndarray
    sqrt_mean: np.ndarray
    sqrt_se: np.ndarray
    samples: int


def expected_offdiag_step(prev_weights, law: Law, n: int, src) -> OffDiagEstimate:
    """Factor roots are averaged first and scaled by ``sqrt(pi_i pi_j)`` afterwards,
    so a unit degenerate law returns the previous magnitudes exactly."""
    prev = _weights(prev_weights)
    roots = np.sqrt(_factor_draws(np.ones_like(prev), law, n, src))
    base = np.sqrt(prev)
    m = roots.mean(axis=0)
    s = roots.std(axis=0, ddof=1) / np.sqrt(n)
    scale = magnitudes(prev)
    product = scale * np.outer(m, m)
    product_se = scale * np.sqrt(np.outer(m ** 2, s ** 2) + np.outer(s ** 2, m ** 2))
    pairs = roots[:, :, None] * roots[:, None, :]
    joint = scale * pairs.mean(axis=0)
    joint_se = scale * pairs.std(axis=0, ddof=1) / np.sqrt(n)
    return OffDiagEstimate(product, joint, product_se, joint_se, base * m, base * s, n)


def expected_information_step(prev_weights, law: Law, n: int, src) -> CondExpEstimate:
    """MC estimate of ``E[sum_q pi_q ln pi_q]`` one step after ``prev_weights``."""
    prev = _weights(prev_weights)
    info = _xlogx(_factor_draws(prev, law, n, src)).sum(axis=1)
    return CondExpEstimate(float(info.mean()), float(info.std(ddof=1) / np.sqrt(n)), n)


def information_gain_floor(law: Law) -> float:
    """Smallest weight whose expected one-step ``pi log pi`` change is >= 0.

    Per component the expected change is
    ``pi * (E[U log U] + (E[U] - 1) log pi)``, which is negative below
    ``exp(-E[U log U] / (E[U] - 1))`` when ``E[U] > 1``.  Returns 0 for
    unit-mean laws and ``inf`` for laws with mean < 1.
    """
    require_factor_law(law)
    cls = law_class(law)
    if cls == "martingale":
        return 0.0
    if cls == "super":
        return float("inf")
    return float(np.exp(-law.mean_xlogx() / (law.mean - 1.0)))


@dataclass(frozen=True)
class StepGaps:
    """Slack in the three one-component inequalities behind the step checks.

    Each field is ``(gap, std_error)``; a positive gap means the inequality
    holds.  With ``p`` the previous weight and ``P = p U`` the next one:

    * ``norm_bound``: ``sqrt(p) - sqrt(E[P])``, positive when ``E[U] < 1``;
    * ``cauchy_schwarz``: ``sqrt(E[P]) - E[sqrt(P)]``;
    * ``jensen``: ``E[P log P] - E[P] log E[P]``.

    Standard errors come from the delta method on a shared sample.
    """

    norm_bound: tuple
    cauchy_schwarz: tuple
    jensen: tuple
    samples: int

    def certified(self, z: float = 3.0) -> dict:
        return {k: bool(g - z * se > 0) for k, (g, se) in
                (("norm_bound", self.norm_bound), ("cauchy_schwarz", self.cauchy_schwarz),
                 ("jensen", self.jensen))}


def step_gaps(prev_weight: float, law: Law, n: int, src) -> StepGaps:
    p = float(prev_weight)
    if not p > 0:
        raise ValueError("previous weight must be > 0")
    nxt = _factor_draws(np.array([p]), law, n, src)[:, 0]
    m = nxt.mean()
    root_m = np.sqrt(m)

    def se(infl):
        return float(infl.std(ddof=1) / np.sqrt(n))

    roots = np.sqrt(nxt)
    norm = (float(np.sqrt(p) - root_m), se(nxt / (2 * root_m)))
    cs = (float(root_m - roots.mean()), se(nxt / (2 * root_m) - roots))
    xl = _xlogx(nxt)
    jen = (float(xl.mean() - m * np.log(m)), se(xl - (np.log(m) + 1.0) * nxt))
    return StepGaps(norm, cs, jen, n)


@dataclass(frozen=True)
class StepVerdict:
    """Certification of one step.

    ``margins`` maps each checked inequality to its slack beyond ``z * SE``
    (positive means certified).  ``passed`` requires every margin positive
    and a non-degenerate law.
    """

    kind: str
    passed: bool
    strict: bool
    margins: dict
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "pass": self.passed, "strict": self.strict,
                "margins": self.margins, "details": self.details}


def _pair_key(i: int, j: int) -> str:
    return f"{i + 1},{j + 1}"


def verify_decoherence_step(prev_weights, law: Law, n: int, src, z: float = 3.0) -> StepVerdict:
    """Check ``E[|Psi_ij|] + z SE < |Psi_ij|_prev`` for every pair ``i < j``."""
    prev = _weights(prev_weights)
    require_factor_law(law)
    if law_class(law) == "sub":
        raise ValueError(f"decoherence needs a factor law with mean <= 1, got mean {law.mean!r}")
    est = expected_offdiag_step(prev, law, n, src)
    mag = magnitudes(prev)
    margins, details = {}, {}
    Q = prev.size
    for i in range(Q):
        for j in range(i + 1, Q):
            key = _pair_key(i, j)
            e, se, ref = float(est.product[i, j]), float(est.product_se[i, j]), float(mag[i, j])
            margins[key] = ref - (e + z * se)
            details[key] = {"estimate": e, "std_error": se, "joint": float(est.joint[i, j]),
                            "joint_std_error": float(est.joint_se[i, j]), "previous": ref,
                            "ratio": e / ref if ref > 0 else None}
    strict = not law.is_degenerate
    passed = strict and bool(margins) and all(v > 0 for v in margins.values())
    return StepVerdict("decoherence", passed, strict, margins, details)


def verify_information_step(prev_weights, law: Law, n: int, src, z: float = 3.0) -> StepVerdict:
    """Check ``E[S_next] - z SE > S_prev``."""
    prev = _weights(prev_weights)
    require_factor_law(law)
    if law_class(law) == "super":
        raise ValueError(f"information gain needs a factor law with mean >= 1, got mean {law.mean!r}")
    est = expected_information_step(prev, law, n, src)
    s_prev = shannon_wiener(prev)
    margin = (est.mean - z * est.std_error) - s_prev
    strict = not law.is_degenerate
    details = {"S": {"estimate": est.mean, "std_error": est.std_error, "previous": s_prev}}
    return StepVerdict("information", strict and margin > 0, strict, {"S": margin}, details)


def verify_martingale_step(prev_weights, law: Law, n: int, src, z: float = 3.0) -> StepVerdict:
    """Both checks under a unit-mean law, on separate substreams."""
    if law_class(law) != "martingale":
        raise ValueError(f"martingale step needs a unit-mean factor law, got mean {law.mean!r}")
    src = as_source(src)
    dec = verify_decoherence_step(prev_weights, law, n, src.child("decoherence"), z)
    inf = verify_information_step(prev_weights, law, n, src.child("information"), z)
    return StepVerdict("both", dec.passed and inf.passed, dec.strict and inf.strict,
                       {**dec.margins, **inf.margins}, {**dec.details, **inf.details})


_CLAUSES = ("super", "sub", "martingale")


def _check_clause(clause: str, law: Law):
    if clause not in _CLAUSES:
        raise ValueError(f"unknown clause {clause!r}; expected one of {_CLAUSES}")
    cls = law_class(law)
    ok = {"super": cls != "sub", "sub": cls != "super", "martingale": cls == "martingale"}[clause]
    if not ok:
        raise ValueError(f"law with mean {law.mean!r} does not satisfy the {clause} clause")


@dataclass(frozen=True)
class TrajectoryReport:
    clause: str
    law: Law
    times: np.ndarray
    weights: np.ndarray       # (M + 1, Q) realized weights
    phases: np.ndarray
    steps: list               # one dict per step k = 1..M
    passed: bool
    z: float
    samples: int

    @property
    def information(self) -> np.ndarray:
        return np.array([shannon_wiener(w) for w in self.weights])

    def to_dict(self) -> dict:
        return {
            "clause": self.clause,
            "law": self.law.to_dict(),
            "times": [float(t) for t in self.times],
            "weights": self.weights.tolist(),
            "phases": self.phases.tolist(),
            "information": self.information.tolist(),
            "z": self.z,
            "samples": self.samples,
            "steps": self.steps,
            "pass": self.passed,
        }

    def magnitudes_csv(self) -> str:
        """Realized off-diagonal magnitudes and information per grid time."""
        Q = self.weights.shape[1]
        pairs = [(i, j) for i in range(Q) for j in range(i + 1, Q)]
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["time"] + [f"m_{i + 1}_{j + 1}" for i, j in pairs] + ["S"])
        for t, w in zip(self.times, self.weights):
            mag = magnitudes(w)
            wr.writerow([repr(float(t))] + [repr(float(mag[i, j])) for i, j in pairs]
                        + [repr(shannon_wiener(w))])
        return buf.getvalue()

    def estimates_csv(self) -> str:
        """Per-step MC estimates: expected magnitudes and expected information."""
        keys = sorted({k for st in self.steps for k in st["details"]},
                      key=lambda k: (k == "S", k))
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        head = ["time"]
        for k in keys:
            tag = "S" if k == "S" else "e_" + k.replace(",", "_")
            head += [tag, tag + "_se"]
        wr.writerow(head + ["pass"])
        for st in self.steps:
            row = [repr(st["time"])]
            for k in keys:
                d = st["details"].get(k)
                row += ["", ""] if d is None else [repr(d["estimate"]), repr(d["std_error"])]
            wr.writerow(row + [int(st["pass"])])
        return buf.getvalue()


def run_full_trajectory(Q: int, grid: TimeGrid, law: Law, w0, phases, n: int, src,
                        clause: str | None = None, z: float = 3.0) -> TrajectoryReport:
    """Simulate one realized trajectory and certify every step against its prefix.

    ``clause`` selects which inequalities are checked (``"super"``:
    decoherence, ``"sub"``: information, ``"martingale"``: both) and
    defaults to the class of ``law``.  The realized path reads substream
    ``"trajectory"``; step ``k`` reads ``("step", k)``.
    """
    require_factor_law(law)
    clause = law_class(law) if clause is None else clause
    _check_clause(clause, law)
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (Q,):
        raise ValueError(f"need {Q} phases, got shape {phases.shape}")
    src = as_source(src)
    traj = simulate_weight_trajectory(Q, grid, law, w0, src.child("trajectory"))
    verify = {"super": verify_decoherence_step, "sub": verify_information_step,
              "martingale": verify_martingale_step}[clause]
    steps = []
    for k in range(1, len(grid)):
        prev = traj.weights[k - 1]
        v = verify(prev, law, n, src.child("step", k), z)
        steps.append({"k": k, "time": float(grid.times[k]), **v.to_dict()})
    passed = all(st["pass"] for st in steps)
    return TrajectoryReport(clause, law, grid.times.copy(), np.array(traj.weights), phases,
                            steps, passed, float(z), n)
