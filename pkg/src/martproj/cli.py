"""Command-line entry point: ``martproj <command> [--config PATH] [flags]``.

Exit status: 0 when every certification in the run passed, 1 when some
certification failed, 2 for config or precondition errors (a JSON error
report is printed), 3 for I/O errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import __version__
from .config import COMMANDS, ConfigError, validate_config
from .experiments import CSV_COLUMNS, run_experiment

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_IO = 3

_HELP = {
    "demo-sine": "sine-plus-Brownian path and the random time-shift transform",
    "classify": "label a multiplicative projection against the prefix terminal value",
    "decohere": "one-step off-diagonal decay check (factor mean <= 1)",
    "inform": "one-step information growth check (factor mean >= 1)",
    "martingale": "both one-step checks under a unit-mean factor law",
    "trajectory": "simulate weights and certify every step of a trajectory",
    "commute": "compare the two composition orders of two transforms",
    "law-check": "KS comparison of a process continuation with a transform family",
}


def _epilog() -> str:
    lines = ["CSV output (written to --out):"]
    lines += [f"  {cmd}: {CSV_COLUMNS[cmd]}" for cmd in COMMANDS]
    lines.append("Exit status: 0 pass, 1 certification failed, 2 config error, 3 I/O error.")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.RawDescriptionHelpFormatter
    parser = argparse.ArgumentParser(prog="martproj", description=__doc__.splitlines()[0],
                                     epilog=_epilog(), formatter_class=fmt)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for cmd in COMMANDS:
        p = sub.add_parser(cmd, help=_HELP[cmd], description=_HELP[cmd],
                           epilog=f"CSV output: {CSV_COLUMNS[cmd]}", formatter_class=fmt)
        p.add_argument("--config", metavar="PATH", help="JSON config file")
        p.add_argument("--seed", type=int, help="unsigned 64-bit seed (overrides config)")
        p.add_argument("--samples", type=int, help="Monte Carlo samples per estimate")
        p.add_argument("--z", type=float, help="confidence multiplier on the standard error")
        p.add_argument("--out", metavar="DIR", help="directory for report.json and CSV files")
    return parser


def _emit_error(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    sys.stdout.write(text)
    if out:
        try:
            os.makedirs(out, exist_ok=True)
            with open(os.path.join(out, "error.json"), "w") as fh:
                fh.write(text)
        except OSError:
            pass


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    data: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            _emit_error({"error": "io", "messages": [str(exc)]}, None)
            return EXIT_IO
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            _emit_error({"error": "config", "messages": [f"malformed JSON: {exc}"]}, args.out)
            return EXIT_CONFIG
        if not isinstance(data, dict):
            _emit_error({"error": "config", "messages": ["config must be a JSON object"]},
                        args.out)
            return EXIT_CONFIG
    for key in ("seed", "samples", "z", "out"):
        val = getattr(args, key)
        if val is not None:
            data[key] = val
    out = data.get("out") if isinstance(data.get("out"), str) else None

    try:
        cfg = validate_config(data, args.command)
    except ConfigError as exc:
        _emit_error(exc.to_dict(), out)
        return EXIT_CONFIG

    start = time.perf_counter()
    try:
        report = run_experiment(cfg)
    except (ValueError, TypeError) as exc:
        _emit_error({"error": "precondition", "messages": [str(exc)]}, out)
        return EXIT_CONFIG
    elapsed = time.perf_counter() - start

    text = report.to_json()
    try:
        if out:
            os.makedirs(out, exist_ok=True)
            with open(os.path.join(out, "report.json"), "w") as fh:
                fh.write(text)
            for name, body in report.files.items():
                with open(os.path.join(out, name), "w", newline="") as fh:
                    fh.write(body)
            with open(os.path.join(out, "timing.json"), "w") as fh:
                json.dump({"command": cfg.command, "wall_clock_s": elapsed}, fh)
                fh.write("\n")
            status = "pass" if report.passed else "FAIL"
            sys.stdout.write(f"{cfg.command}: {status} (report in {out})\n")
        else:
            sys.stdout.write(text)
    except OSError as exc:
        _emit_error({"error": "io", "messages": [str(exc)]}, None)
        return EXIT_IO
    sys.stderr.write(f"{cfg.command}: {elapsed:.3f} s\n")
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
