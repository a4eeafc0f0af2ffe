"""Seeded generic sampling.

Every random draw is addressed by ``(seed, *labels)``.  Labels are hashed
into a numpy ``SeedSequence`` spawn key, so each stage of a pipeline has its
own reproducible stream no matter what other stages consumed.
"""

from __future__ import annotations

import zlib
from fractions import Fraction
from typing import Sequence

import numpy as np


def _label_int(label) -> int:
    if isinstance(label, (int, np.integer)) and label >= 0:
        return int(label)
    return zlib.crc32(str(label).encode())


def rng_for(seed: int, *labels) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_label_int(l) for l in labels))
    return np.random.Generator(np.random.PCG64(ss))


def sample_generic(shape, seed: int, bound: int, stream: Sequence = ()) -> list:
    """Uniform integers in [-bound, bound] with the given shape (int or tuple).

    Deterministic in (seed, stream, shape, bound).  Returns nested Python lists.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    rng = rng_for(seed, *stream)
    return rng.integers(-bound, bound, size=shape, endpoint=True).tolist()


def sample_vector(n: int, seed: int, bound: int, stream: Sequence = (), nonzero: bool = True):
    """A length-n Fraction vector; redraws (on a sub-stream) until nonzero if requested."""
    for k in range(1000):
        v = sample_generic(n, seed, bound, tuple(stream) + (k,))
        if not nonzero or any(v):
            return tuple(Fraction(x) for x in v)
    raise RuntimeError("could not draw a nonzero vector")  # pragma: no cover


def sample_matrix(rows: int, cols: int, seed: int, bound: int, stream: Sequence = ()):
    m = sample_generic((rows, cols), seed, bound, stream)
    return [[Fraction(x) for x in row] for row in m]
