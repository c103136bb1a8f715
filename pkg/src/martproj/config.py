"""Experiment configuration: JSON parsing and validation.

A config is a JSON object.  Common keys are ``command``, ``seed``,
``samples``, ``z`` and ``out``; every other key belongs to the command
(see ``COMMAND_KEYS``).  Unknown keys are rejected, and validation reports
every violated constraint at once through :class:`ConfigError`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .laws import Law, law_from_dict

__all__ = [
    "COMMANDS",
    "COMMAND_KEYS",
    "DEFAULT_SAMPLES",
    "DEFAULT_Z",
    "ConfigError",
    "ExperimentConfig",
    "parse_config",
    "validate_config",
]

DEFAULT_SAMPLES = 50_000
DEFAULT_Z = 3.0
DEFAULT_SEED = 0

COMMON_KEYS = ("command", "seed", "samples", "z", "out")

COMMAND_KEYS = {
    "demo-sine": ("M", "epsilon", "tau"),
    "classify": ("law", "prefix", "expect"),
    "decohere": ("law", "weights"),
    "inform": ("law", "weights"),
    "martingale": ("law", "weights"),
    "trajectory": ("law", "Q", "grid", "weights", "phases", "clause"),
    "commute": ("times", "values", "first", "second", "expect"),
    "law-check": ("law", "family_law", "prefix", "trials", "expect"),
}
COMMANDS = tuple(COMMAND_KEYS)

_REQUIRED = {
    "classify": ("law",),
    "decohere": ("law", "weights"),
    "inform": ("law", "weights"),
    "martingale": ("law", "weights"),
    "trajectory": ("law",),
    "commute": ("first", "second"),
    "law-check": ("law",),
}

_LABELS = ("Supermartingale", "Submartingale", "MartingaleConsistent", "Indeterminate")
_STRETCHABLE = ("identity", "vertical_bump", "interior_bump", "horizontal_stretch")


class ConfigError(ValueError):
    """Config rejected; ``errors`` lists every violation."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))

    def to_dict(self) -> dict:
        return {"error": "config", "messages": self.errors}


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    seed: int = DEFAULT_SEED
    samples: int = DEFAULT_SAMPLES
    z: float = DEFAULT_Z
    out: str | None = None
    params: dict = field(default_factory=dict)

    def echo(self) -> dict:
        """Normalized config with defaults filled in (excluding ``out``)."""
        return {"command": self.command, "seed": self.seed, "samples": self.samples,
                "z": self.z, **_echo_params(self.params)}


def _echo_params(value):
    if isinstance(value, Law):
        return value.to_dict()
    if isinstance(value, dict):
        return {k: _echo_params(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_echo_params(v) for v in value]
    return value


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


class _Checker:
    def __init__(self):
        self.errors: list[str] = []

    def fail(self, msg):
        self.errors.append(msg)

    def law(self, key, data, factor=True):
        try:
            law = law_from_dict(data)
        except (ValueError, TypeError) as exc:
            self.fail(f"{key}: {exc}")
            return None
        if factor and not law.is_factor:
            self.fail(f"{key}: {law.family} law is not supported on [0, inf)")
            return None
        return law

    def numbers(self, key, data, nonneg=False, nonempty=True):
        if not isinstance(data, list) or not all(_is_num(v) for v in data):
            self.fail(f"{key}: must be a list of finite numbers")
            return None
        if nonempty and not data:
            self.fail(f"{key}: must be nonempty")
            return None
        if nonneg and any(v < 0 for v in data):
            self.fail(f"{key}: entries must be >= 0")
            return None
        return [float(v) for v in data]


def validate_config(data: dict, command: str | None = None) -> ExperimentConfig:
    """Validate a decoded JSON object; raises :class:`ConfigError`."""
    if not isinstance(data, dict):
        raise ConfigError(["config must be a JSON object"])
    ck = _Checker()
    cmd = data.get("command", command)
    if command is not None and "command" in data and data["command"] != command:
        ck.fail(f"config is for command {data['command']!r} but {command!r} was requested")
        cmd = command
    if cmd not in COMMAND_KEYS:
        raise ConfigError([f"unknown or missing command {cmd!r}; expected one of {list(COMMANDS)}"])

    allowed = set(COMMON_KEYS) | set(COMMAND_KEYS[cmd])
    for key in sorted(set(data) - allowed):
        ck.fail(f"unknown key {key!r} for command {cmd!r}")
    for key in _REQUIRED.get(cmd, ()):
        if key not in data:
            ck.fail(f"missing required key {key!r}")

    seed = data.get("seed", DEFAULT_SEED)
    if not _is_int(seed) or not 0 <= seed < 2**64:
        ck.fail("seed: must be an unsigned 64-bit integer")
    samples = data.get("samples", DEFAULT_SAMPLES)
    if not _is_int(samples) or samples < 2:
        ck.fail("samples: must be an integer >= 2")
    z = data.get("z", DEFAULT_Z)
    if not _is_num(z) or z < 0:
        ck.fail("z: must be a number >= 0")
    out = data.get("out")
    if out is not None and not isinstance(out, str):
        ck.fail("out: must be a path string")

    params = _COMMAND_VALIDATORS[cmd](ck, data)
    if ck.errors:
        raise ConfigError(ck.errors)
    return ExperimentConfig(cmd, int(seed), int(samples), float(z), out, params)


def parse_config(text: str, command: str | None = None) -> ExperimentConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"malformed JSON: {exc}"]) from None
    return validate_config(data, command)


# -- per-command validators ----------------------------------------------------

def _v_demo_sine(ck: _Checker, d: dict) -> dict:
    M = d.get("M", 300)
    if not _is_int(M) or M < 3 or M % 3:
        ck.fail("M: must be a positive multiple of 3")
    eps = ck.law("epsilon", d.get("epsilon", {"family": "normal", "mean": 0.0, "std": 1.0}),
                 factor=False)
    tau = d.get("tau")
    if tau is not None:
        tau = ck.law("tau", tau, factor=False)
    return {"M": M, "epsilon": eps, "tau": tau}


def _v_classify(ck, d):
    law = ck.law("law", d["law"]) if "law" in d else None
    prefix = ck.numbers("prefix", d.get("prefix", [1.0]))
    expect = d.get("expect")
    if expect is not None and expect not in _LABELS:
        ck.fail(f"expect: must be one of {list(_LABELS)}")
    return {"law": law, "prefix": prefix, "expect": expect}


def _v_weights_step(ck, d):
    law = ck.law("law", d["law"]) if "law" in d else None
    weights = ck.numbers("weights", d["weights"], nonneg=True) if "weights" in d else None
    return {"law": law, "weights": weights}


def _v_trajectory(ck, d):
    law = ck.law("law", d["law"]) if "law" in d else None
    grid = d.get("grid", {"t0": 0.0, "tM": 10.0, "M": 10})
    if not isinstance(grid, dict) or set(grid) != {"t0", "tM", "M"}:
        ck.fail("grid: must be an object with exactly the keys t0, tM, M")
        grid = None
    elif not (_is_num(grid["t0"]) and _is_num(grid["tM"]) and _is_int(grid["M"])):
        ck.fail("grid: t0 and tM must be numbers and M an integer")
        grid = None
    elif grid["M"] < 1 or grid["t0"] < 0 or not grid["tM"] > grid["t0"]:
        ck.fail("grid: need M >= 1 and 0 <= t0 < tM")
        grid = None
    weights = ck.numbers("weights", d["weights"], nonneg=True) if "weights" in d else None
    Q = d.get("Q")
    if Q is not None and (not _is_int(Q) or Q < 1):
        ck.fail("Q: must be a positive integer")
        Q = None
    if Q is None:
        Q = len(weights) if weights else 4
    if weights is not None and len(weights) != Q:
        ck.fail(f"weights: expected {Q} entries, got {len(weights)}")
    if weights is None:
        weights = [1.0 / Q] * Q
    phases = d.get("phases")
    if phases is None:
        phases = [0.0] * Q
    else:
        phases = ck.numbers("phases", phases)
        if phases is not None and len(phases) != Q:
            ck.fail(f"phases: expected {Q} entries, got {len(phases)}")
    clause = d.get("clause")
    if clause is not None and clause not in ("super", "sub", "martingale"):
        ck.fail("clause: must be one of super, sub, martingale")
    return {"law": law, "Q": Q, "grid": grid, "weights": weights, "phases": phases,
            "clause": clause}


def _v_transform_spec(ck, key, spec):
    if not isinstance(spec, dict) or "kind" not in spec:
        ck.fail(f"{key}: must be an object with a 'kind'")
        return None
    if spec["kind"] not in _STRETCHABLE:
        ck.fail(f"{key}: kind must be one of {list(_STRETCHABLE)}")
        return None
    out = dict(spec)
    if "epsilon" in out:
        out["epsilon"] = ck.law(f"{key}.epsilon", out["epsilon"], factor=False)
    return out


def _v_commute(ck, d):
    times = ck.numbers("times", d.get("times", [0.0, 1.0, 2.0, 3.0]), nonneg=True)
    values = ck.numbers("values", d.get("values", [0.0, 0.0, 0.0]))
    if times is not None and values is not None and len(values) > len(times):
        ck.fail("values: more values than grid times")
    first = _v_transform_spec(ck, "first", d["first"]) if "first" in d else None
    second = _v_transform_spec(ck, "second", d["second"]) if "second" in d else None
    expect = d.get("expect")
    if expect is not None and expect not in ("commute", "noncommute"):
        ck.fail("expect: must be 'commute' or 'noncommute'")
    return {"times": times, "values": values, "first": first, "second": second,
            "expect": expect}


def _v_law_check(ck, d):
    law = ck.law("law", d["law"]) if "law" in d else None
    fam = ck.law("family_law", d["family_law"]) if "family_law" in d else law
    prefix = ck.numbers("prefix", d.get("prefix", [1.0]))
    trials = d.get("trials", 1)
    if not _is_int(trials) or trials < 1:
        ck.fail("trials: must be a positive integer")
    expect = d.get("expect")
    if expect is not None and expect not in ("pass", "fail"):
        ck.fail("expect: must be 'pass' or 'fail'")
    return {"law": law, "family_law": fam, "prefix": prefix, "trials": trials, "expect": expect}


_COMMAND_VALIDATORS = {
    "demo-sine": _v_demo_sine,
    "classify": _v_classify,
    "decohere": _v_weights_step,
    "inform": _v_weights_step,
    "martingale": _v_weights_step,
    "trajectory": _v_trajectory,
    "commute": _v_commute,
    "law-check": _v_law_check,
}
