"""Seeded, splittable random streams.

A :class:`RandomSource` is a value (seed plus a key path), not a stateful
generator. Every call to :meth:`RandomSource.rng` starts the same stream
from its beginning, and :meth:`RandomSource.child` derives independent
substreams by label through :class:`numpy.random.SeedSequence` spawn keys.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

_MAX_SEED = 2**64


def _label_to_int(label) -> int:
    if isinstance(label, (bool, np.bool_)):
        raise TypeError("boolean substream labels are ambiguous")
    if isinstance(label, (int, np.integer)):
        if label < 0:
            raise ValueError(f"integer substream label must be >= 0, got {label}")
        return int(label)
    if isinstance(label, str):
        digest = hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "little")
    raise TypeError(f"substream label must be int or str, got {type(label).__name__}")


@dataclass(frozen=True)
class RandomSource:
    """Deterministic random stream identified by ``(seed, key)``.

    Parameters
    ----------
    seed : int
        Unsigned 64-bit root seed.
    key : tuple of int
        Spawn-key path below the root; built up by :meth:`child`.

    Examples
    --------
    >>> src = RandomSource(7)
    >>> a = src.child("eps").rng().normal()
    >>> b = src.child("eps").rng().normal()
    >>> a == b
    True
    """

    seed: int
    key: tuple = ()

    def __post_init__(self):
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)):
            raise TypeError("seed must be an integer")
        if not 0 <= int(self.seed) < _MAX_SEED:
            raise ValueError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "key", tuple(int(k) for k in self.key))

    def child(self, *labels) -> "RandomSource":
        """Substream reached by appending ``labels`` (ints or strings) to the key."""
        return RandomSource(self.seed, self.key + tuple(_label_to_int(lab) for lab in labels))

    def rng(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=self.key)))


def as_source(src) -> RandomSource:
    """Coerce an int seed or a :class:`RandomSource` into a :class:`RandomSource`."""
    if isinstance(src, RandomSource):
        return src
    return RandomSource(src)
