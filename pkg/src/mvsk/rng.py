"""Seed-portable pseudo-random numbers for the experiment harness.

SplitMix64 (Steele, Lea & Flood's 64-bit mix generator, the seeding generator
of the xoshiro family) with Box-Muller normals.  The generator is five lines
of integer arithmetic, so seeded node sets are reproducible bit-for-bit from
any language, which numpy's default bit generator would not give us.
"""

from __future__ import annotations

import math

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """Deterministic 64-bit generator; uniforms use the top 53 bits."""

    def __init__(self, seed: int):
        self._state = int(seed) & _MASK

    def next_uint64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """One double in [0, 1)."""
        return (self.next_uint64() >> 11) * (1.0 / (1 << 53))

    def uniforms(self, n: int) -> np.ndarray:
        return np.array([self.uniform() for _ in range(n)])

    def normals(self, n: int) -> np.ndarray:
        """n standard normals via Box-Muller on consecutive uniform pairs."""
        out = np.empty(n)
        i = 0
        while i < n:
            u1 = self.uniform()
            u2 = self.uniform()
            # u1 = 0 would put log at -inf; the top-53-bit uniform can hit 0
            while u1 == 0.0:
                u1 = self.uniform()
            radius = math.sqrt(-2.0 * math.log(u1))
            angle = 2.0 * math.pi * u2
            out[i] = radius * math.cos(angle)
            if i + 1 < n:
                out[i + 1] = radius * math.sin(angle)
            i += 2
        return out


def derive_seed(seed: int, *indices: int) -> int:
    """Stable sub-seed for a stream identified by integer indices."""
    mixed = int(seed) & _MASK
    for idx in indices:
        mixed = (mixed * 1000003 + int(idx) + 1) & _MASK
    return mixed
