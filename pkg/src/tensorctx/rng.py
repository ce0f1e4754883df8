"""Seeded randomness.

Every random draw is made from a ``numpy`` PCG64 generator created from an
explicit integer seed; there is no module-level generator.  Measurement ``k``
of a circuit run with seed ``s`` uses ``sub_seed(s, k)``, a SplitMix64 mix of
the pair, so multi-measurement runs are reproducible bit for bit.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    z = (x + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def sub_seed(seed: int, k: int) -> int:
    """64-bit seed for the ``k``-th consumer under ``seed``."""
    return splitmix64((splitmix64(seed & _MASK) ^ (k & _MASK)) & _MASK)


def generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & _MASK))
