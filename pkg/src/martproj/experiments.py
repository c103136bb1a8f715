"""Run validated experiment configs and assemble reports.

Every numeric field of a :class:`RunReport` is a pure function of the
config (seed included); wall-clock time is kept out of the report so that
identical configs give byte-identical JSON.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .classifier import classify_projection, law_consistency_check
from .config import ExperimentConfig
from .dynamics import MultiplicativeProcess, gaussian_sine_path
from .grid import Path, TimeGrid, Window, path_to_dict, restrict, uniform_grid
from .quantum import (run_full_trajectory, verify_decoherence_step, verify_information_step,
                      verify_martingale_step)
from .streams import RandomSource
from .transforms import Multiplicative, SineDemo, builtin_transform, commutator_check

__all__ = ["SCHEMA_VERSION", "RunReport", "run_experiment", "CSV_COLUMNS"]

SCHEMA_VERSION = 1

# Documented in the CLI help.
CSV_COLUMNS = {
    "demo-sine": "demo_sine.csv: time, x (input path on [0, 2pi]), y (output on [pi, 3pi])",
    "classify": "none",
    "decohere": "decohere.csv: pair, estimate, std_error, previous, margin",
    "inform": "inform.csv: estimate, std_error, previous, margin",
    "martingale": "martingale.csv: check, estimate, std_error, previous, margin",
    "trajectory": ("magnitudes.csv: time, m_i_j (realized |Psi_ij|, i<j), S; "
                   "estimates.csv: time, e_i_j, e_i_j_se, S, S_se, pass; "
                   "weights.csv: time, q, value"),
    "commute": "commute.csv: time, left (t1 after t2), right (t2 after t1)",
    "law-check": "law_check.csv: trial, ks_stat, critical, pass",
}


@dataclass
class RunReport:
    config: ExperimentConfig
    results: dict
    passed: bool
    files: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "version": __version__,
            "command": self.config.command,
            "seed": self.config.seed,
            "config": self.config.echo(),
            "results": self.results,
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(_clean(self.to_dict()), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _clean(obj):
    """Make report data JSON-safe: numpy scalars to python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    return obj


def _csv(rows) -> str:
    return "".join(",".join(_cell(c) for c in r) + "\n" for r in rows)


def _cell(c) -> str:
    if isinstance(c, (float, np.floating)):
        return repr(float(c))
    if c is None:
        return ""
    return str(c)


def _prefix_path(values):
    grid = TimeGrid(np.arange(len(values) + 1, dtype=float))
    return Path(Window.from_indices(grid, 0, len(values)), values), grid


def _run_demo_sine(cfg: ExperimentConfig, src: RandomSource):
    p = cfg.params
    M = p["M"]
    grid = uniform_grid(0.0, 3 * math.pi, M)
    x_full = gaussian_sine_path(grid, src.child("path"))
    src_win = Window.from_indices(grid, 0, 2 * M // 3 + 1)
    tgt_win = Window.from_indices(grid, M // 3, M + 1)
    x = restrict(x_full, src_win)
    tf = SineDemo(src_win, tgt_win, p["epsilon"], p["tau"])
    y = tf.apply(x, src.child("transform"))
    overlap = tgt_win.times < src_win.t
    copied = bool(np.array_equal(y.values[overlap], x.values[tgt_win.start:][:overlap.sum()]))
    rows = [("time", "x", "y")]
    for i, t in enumerate(grid.times):
        xv = x.values[i] if i < len(src_win) else None
        yv = y.values[i - tgt_win.start] if i >= tgt_win.start else None
        rows.append((float(t), xv, yv))
    results = {"transform": tf.to_dict(), "input": path_to_dict(x), "output": path_to_dict(y),
               "copies_input_before_pivot": copied}
    return results, copied, {"demo_sine.csv": _csv(rows)}


def _run_classify(cfg, src):
    p = cfg.params
    x, grid = _prefix_path(p["prefix"])
    tf = Multiplicative(x.window, Window(grid, grid.sup, grid.sup), p["law"])
    verdict = classify_projection(tf, x, cfg.samples, cfg.z, src)
    label = verdict.label.value
    ok = label == p["expect"] if p["expect"] else label != "Indeterminate"
    return {"verdict": verdict.to_dict(), "expect": p["expect"]}, ok, {}


def _run_step(cfg, src, which):
    p = cfg.params
    fn = {"decohere": verify_decoherence_step, "inform": verify_information_step,
          "martingale": verify_martingale_step}[which]
    v = fn(p["weights"], p["law"], cfg.samples, src, cfg.z)
    rows = [("check", "estimate", "std_error", "previous", "margin")]
    for key, d in v.details.items():
        rows.append((key, d["estimate"], d["std_error"], d["previous"], v.margins[key]))
    return {"verdict": v.to_dict()}, v.passed, {f"{which}.csv": _csv(rows)}


def _run_trajectory(cfg, src):
    p = cfg.params
    g = p["grid"]
    grid = uniform_grid(g["t0"], g["tM"], g["M"])
    rep = run_full_trajectory(p["Q"], grid, p["law"], p["weights"], p["phases"], cfg.samples,
                              src, p["clause"], cfg.z)
    files = {"magnitudes.csv": rep.magnitudes_csv(), "estimates.csv": rep.estimates_csv()}
    rows = [("time", "q", "value")]
    for t, w in zip(rep.times, rep.weights):
        rows += [(float(t), q + 1, float(v)) for q, v in enumerate(w)]
    files["weights.csv"] = _csv(rows)
    return {"trajectory": rep.to_dict()}, rep.passed, files


def _run_commute(cfg, src):
    p = cfg.params
    grid = TimeGrid(p["times"])
    x = Path(Window.from_indices(grid, 0, len(p["values"])), p["values"])

    def build(spec):
        spec = dict(spec)
        return builtin_transform(spec.pop("kind"), x.window, None, **spec)

    t1, t2 = build(p["first"]), build(p["second"])
    rep = commutator_check(t1, t2, x, src)
    n = max(len(rep.left.window), len(rep.right.window))
    longer = rep.left if len(rep.left.window) >= len(rep.right.window) else rep.right
    rows = [("time", "left", "right")]
    for i in range(n):
        lv = rep.left.values[i] if i < len(rep.left.window) else None
        rv = rep.right.values[i] if i < len(rep.right.window) else None
        rows.append((float(longer.times[i]), lv, rv))
    ok = True if p["expect"] is None else rep.equal == (p["expect"] == "commute")
    return {"commutator": rep.to_dict(), "expect": p["expect"]}, ok, {"commute.csv": _csv(rows)}


def _run_law_check(cfg, src):
    p = cfg.params
    x, grid = _prefix_path(p["prefix"])
    process = MultiplicativeProcess(p["law"])
    family = Multiplicative(x.window, Window(grid, grid.sup, grid.sup), p["family_law"])
    trials = []
    for i in range(p["trials"]):
        r = law_consistency_check(process, family, x, grid.sup, cfg.samples, src.child("trial", i))
        trials.append(r.to_dict())
    passes = sum(t["pass"] for t in trials)
    want = p["expect"] or "pass"
    ok = passes == len(trials) if want == "pass" else passes == 0
    rows = [("trial", "ks_stat", "critical", "pass")]
    rows += [(i, t["ks_stat"], t["critical"], int(t["pass"])) for i, t in enumerate(trials)]
    return ({"trials": trials, "passes": passes, "expect": p["expect"]}, ok,
            {"law_check.csv": _csv(rows)})


_RUNNERS = {
    "demo-sine": _run_demo_sine,
    "classify": _run_classify,
    "decohere": lambda c, s: _run_step(c, s, "decohere"),
    "inform": lambda c, s: _run_step(c, s, "inform"),
    "martingale": lambda c, s: _run_step(c, s, "martingale"),
    "trajectory": _run_trajectory,
    "commute": _run_commute,
    "law-check": _run_law_check,
}


def run_experiment(cfg: ExperimentConfig) -> RunReport:
    """Execute ``cfg.command``; ``passed`` is true iff every certification held."""
    src = RandomSource(cfg.seed)
    results, passed, files = _RUNNERS[cfg.command](cfg, src)
    return RunReport(cfg, results, bool(passed), files)
