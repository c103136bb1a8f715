"""Finite time grids, contiguous windows and paths over windows.

Grid membership is decided by exact equality of stored float values; no
tolerance is ever applied.  All objects are immutable after construction.
"""

from __future__ import annotations

import csv
import io
from typing import Sequence

import numpy as np

__all__ = [
    "TimeGrid",
    "Window",
    "Path",
    "make_grid",
    "uniform_grid",
    "window",
    "make_path",
    "restrict",
    "path_to_dict",
    "path_from_dict",
    "path_to_csv",
    "path_from_csv",
]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class TimeGrid:
    """Strictly increasing, nonempty, finite set of nonnegative times."""

    __slots__ = ("_times",)

    def __init__(self, times: Sequence[float]):
        arr = np.array(times, dtype=float).reshape(-1)
        if arr.size == 0:
            raise ValueError("time grid must be nonempty")
        if not np.all(np.isfinite(arr)):
            raise ValueError("time grid values must be finite")
        if np.any(arr < 0):
            raise ValueError("time grid values must be >= 0")
        steps = np.diff(arr)
        if np.any(steps == 0):
            raise ValueError("time grid contains a duplicate time")
        if np.any(steps < 0):
            raise ValueError("time grid must be sorted in increasing order")
        self._times = _frozen(arr)

    @property
    def times(self) -> np.ndarray:
        return self._times

    @property
    def inf(self) -> float:
        return float(self._times[0])

    @property
    def sup(self) -> float:
        return float(self._times[-1])

    def __len__(self) -> int:
        return self._times.size

    def __contains__(self, t) -> bool:
        i = int(np.searchsorted(self._times, t))
        return i < self._times.size and self._times[i] == t

    def index(self, t: float) -> int:
        """Position of ``t`` in the grid; raises ``ValueError`` if absent."""
        i = int(np.searchsorted(self._times, t))
        if i >= self._times.size or self._times[i] != t:
            raise ValueError(f"time {t!r} is not a grid member")
        return i

    def full(self) -> "Window":
        return Window(self, self.inf, self.sup)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeGrid):
            return NotImplemented
        return other is self or np.array_equal(self._times, other._times)

    def __hash__(self) -> int:
        return hash(self._times.tobytes())

    def __repr__(self) -> str:
        if len(self) <= 6:
            return f"TimeGrid({self._times.tolist()})"
        return f"TimeGrid([{self.inf}, ..., {self.sup}], n={len(self)})"


class Window:
    """Contiguous subset ``[r, t] ∩ grid`` of a :class:`TimeGrid`.

    ``r`` and ``t`` must themselves be grid members, so a window is never
    empty and ``inf``/``sup`` of its point set are exactly ``r``/``t``.
    """

    __slots__ = ("grid", "start", "stop")

    def __init__(self, grid: TimeGrid, r: float, t: float):
        if r > t:
            raise ValueError(f"window requires r <= t, got r={r!r}, t={t!r}")
        self.grid = grid
        self.start = grid.index(r)
        self.stop = grid.index(t) + 1

    @classmethod
    def from_indices(cls, grid: TimeGrid, start: int, stop: int) -> "Window":
        """Window over ``grid.times[start:stop]`` (python slice convention)."""
        if not 0 <= start < stop <= len(grid):
            raise ValueError(f"invalid window index range [{start}, {stop})")
        return cls(grid, grid.times[start], grid.times[stop - 1])

    @property
    def r(self) -> float:
        return float(self.grid.times[self.start])

    @property
    def t(self) -> float:
        return float(self.grid.times[self.stop - 1])

    @property
    def times(self) -> np.ndarray:
        return self.grid.times[self.start:self.stop]

    def __len__(self) -> int:
        return self.stop - self.start

    @property
    def is_singleton(self) -> bool:
        return self.stop - self.start == 1

    def issubset(self, other: "Window") -> bool:
        return self.grid == other.grid and other.start <= self.start and self.stop <= other.stop

    def __contains__(self, t) -> bool:
        return t in self.grid and self.r <= t <= self.t

    def __eq__(self, other) -> bool:
        if not isinstance(other, Window):
            return NotImplemented
        return self.grid == other.grid and self.start == other.start and self.stop == other.stop

    def __hash__(self) -> int:
        return hash((self.grid, self.start, self.stop))

    def __repr__(self) -> str:
        return f"Window(r={self.r}, t={self.t}, points={len(self)})"

    def to_dict(self) -> dict:
        return {"grid": self.grid.times.tolist(), "r": self.r, "t": self.t}

    @classmethod
    def from_dict(cls, data: dict) -> "Window":
        return cls(TimeGrid(data["grid"]), data["r"], data["t"])


class Path:
    """Samples of a state over the points of a window.

    ``values`` has shape ``(len(window),)`` for real scalar states and
    ``(len(window), Q)`` for nonnegative weight vectors.
    """

    __slots__ = ("window", "values")

    def __init__(self, window: Window, values):
        arr = np.array(values, dtype=float)
        if arr.ndim not in (1, 2):
            raise ValueError("path values must be a sequence of scalars or of weight vectors")
        if arr.shape[0] != len(window):
            raise ValueError(
                f"path has {arr.shape[0]} values but the window has {len(window)} points")
        if arr.ndim == 2:
            if arr.shape[1] == 0:
                raise ValueError("weight vectors must have at least one component")
            if np.any(arr < 0):
                raise ValueError("weight-vector path entries must be >= 0")
        if not np.all(np.isfinite(arr)):
            raise ValueError("path values must be finite")
        self.window = window
        self.values = _frozen(arr)

    @property
    def times(self) -> np.ndarray:
        return self.window.times

    @property
    def is_weight(self) -> bool:
        return self.values.ndim == 2

    @property
    def state_shape(self) -> tuple:
        return self.values.shape[1:]

    @property
    def terminal(self):
        """Value at the window's last point (``X_r`` for a prefix over ``[p, r]``)."""
        v = self.values[-1]
        return v.copy() if self.is_weight else float(v)

    def at(self, t: float):
        i = self.window.grid.index(t)
        if not self.window.start <= i < self.window.stop:
            raise ValueError(f"time {t!r} is outside the path window")
        v = self.values[i - self.window.start]
        return v.copy() if self.is_weight else float(v)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Path):
            return NotImplemented
        return self.window == other.window and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash((self.window, self.values.tobytes()))

    def __repr__(self) -> str:
        return f"Path({self.window!r}, values={self.values.tolist()!r})"


def make_grid(times: Sequence[float]) -> TimeGrid:
    return TimeGrid(times)


def uniform_grid(t0: float, tM: float, M: int) -> TimeGrid:
    """Grid of ``M + 1`` equally spaced times from ``t0`` to ``tM`` inclusive."""
    if int(M) != M or M < 0:
        raise ValueError("M must be a nonnegative integer")
    if M == 0:
        return TimeGrid([t0])
    return TimeGrid(np.linspace(t0, tM, int(M) + 1))


def window(grid: TimeGrid, r: float, t: float) -> Window:
    return Window(grid, r, t)


def make_path(win: Window, values) -> Path:
    return Path(win, values)


def restrict(path: Path, sub: Window) -> Path:
    """Restrict ``path`` to the points of ``sub``; values are copied bit for bit."""
    if not sub.issubset(path.window):
        raise ValueError(f"{sub!r} is not contained in {path.window!r}")
    lo = sub.start - path.window.start
    return Path(sub, path.values[lo:lo + len(sub)])


# -- serialization -----------------------------------------------------------

def path_to_dict(path: Path) -> dict:
    return {"window": path.window.to_dict(), "values": path.values.tolist()}


def path_from_dict(data: dict) -> Path:
    return Path(Window.from_dict(data["window"]), data["values"])


def path_to_csv(path: Path) -> str:
    """CSV text with columns ``time,value`` (or ``time,value_1..value_Q``).

    Floats are written with ``repr`` so the text round-trips to the same
    binary value.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if path.is_weight:
        writer.writerow(["time"] + [f"value_{q + 1}" for q in range(path.values.shape[1])])
    else:
        writer.writerow(["time", "value"])
    for t, v in zip(path.times, path.values):
        row = [repr(float(t))]
        row += [repr(float(x)) for x in np.atleast_1d(v)]
        writer.writerow(row)
    return buf.getvalue()


def path_from_csv(text: str, grid: TimeGrid | None = None) -> Path:
    """Parse :func:`path_to_csv` output.

    Without ``grid`` the path's own times form the grid.
    """
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][0] != "time":
        raise ValueError("CSV path must start with a 'time' header column")
    header, body = rows[0], [r for r in rows[1:] if r]
    times = [float(r[0]) for r in body]
    vals = [[float(x) for x in r[1:]] for r in body]
    if grid is None:
        grid = TimeGrid(times)
    win = Window(grid, times[0], times[-1])
    if len(header) == 2 and header[1] == "value":
        return Path(win, [v[0] for v in vals])
    return Path(win, vals)
