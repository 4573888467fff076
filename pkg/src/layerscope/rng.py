"""Deterministic pseudo-random source.

xoshiro256** seeded through splitmix64. Chosen over numpy's generators so
that byte-identical draw sequences can be reproduced from the 64-bit seed
in any language; artifact reproducibility depends on it.
"""

from __future__ import annotations

import math

from .exceptions import ValidationError

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns (next_state, output)."""
    state = (state + _GOLDEN) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    z = z ^ (z >> 31)
    return state, z


def derive_seed(root: int, index: int) -> int:
    """Per-output seed for output ``index`` under root seed ``root``.

    A pure function of (root, index), so parallel workers can seed
    themselves without any shared draw order.
    """
    if index < 0:
        raise ValidationError(f"index must be non-negative, got {index}")
    state = (int(root) + index * _GOLDEN) & _MASK
    _, out = _splitmix64(state)
    return out


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


class Rng:
    """xoshiro256** with a 256-bit state expanded from a 64-bit seed."""

    def __init__(self, seed: int):
        state = int(seed) & _MASK
        s = []
        for _ in range(4):
            state, out = _splitmix64(state)
            s.append(out)
        if not any(s):
            s[0] = 1  # all-zero state would be a fixed point
        self._s = s

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & _MASK, 7) * 9) & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        """One draw from [low, high)."""
        if not high > low:
            raise ValidationError(f"uniform needs high > low, got [{low}, {high})")
        frac = (self.next_u64() >> 11) * 2.0**-53
        value = low + (high - low) * frac
        if value >= high:  # fp rounding guard at the open end
            value = math.nextafter(high, low)
        return value

    def uniform_array(self, n: int, low: float = 0.0, high: float = 1.0):
        import numpy as np

        return np.array([self.uniform(low, high) for _ in range(n)], dtype=np.float64)

    def below(self, n: int) -> int:
        """Unbiased integer draw from [0, n) by rejection."""
        if n <= 0:
            raise ValidationError(f"below needs n > 0, got {n}")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n
