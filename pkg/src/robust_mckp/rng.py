"""Deterministic, platform-independent random streams.

SplitMix64 is used everywhere randomness is needed: it is a counter-based
generator, so independent substreams (one per item, one per scenario) are
cheap to derive and the same stream can be produced either scalar-by-scalar
or as a vectorized numpy batch.
"""

from __future__ import annotations

import math

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# 2**-53: top 53 bits of a u64 map to a double in [0, 1)
_INV53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    """Finalizing mixer of SplitMix64 (bijective on 64-bit ints)."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    """Scalar SplitMix64 stream with uniform and normal draws."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        return mix64(self.state)

    def uniform(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * _INV53

    def uniform_open(self) -> float:
        """Uniform double in (0, 1), safe as a log/Box-Muller argument."""
        return ((self.next_u64() >> 11) + 0.5) * _INV53

    def uniform_in(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.uniform()

    def normal(self) -> float:
        """Standard normal via Box-Muller; consumes exactly two draws."""
        u1 = self.uniform_open()
        u2 = self.uniform_open()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def lognormal(self, mu: float, tau: float) -> float:
        return math.exp(mu + tau * self.normal())

    def randint(self, lo: int, hi: int) -> int:
        """Integer in [lo, hi] (modulo reduction; bias negligible at 64 bits)."""
        return lo + self.next_u64() % (hi - lo + 1)


def substream(seed: int, index: int) -> SplitMix64:
    """Independent child stream for (seed, index).

    The child seed is scrambled through the mixer so sibling streams do not
    overlap shifted copies of each other.
    """
    return SplitMix64(mix64((seed + (index + 1) * _GOLDEN) & _MASK))


# -- vectorized counterpart (bit-identical to the scalar path) --------------

_NP_GOLDEN = np.uint64(_GOLDEN)
_NP_MIX1 = np.uint64(_MIX1)
_NP_MIX2 = np.uint64(_MIX2)


def _mix64_np(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _NP_MIX1
    z = (z ^ (z >> np.uint64(27))) * _NP_MIX2
    return z ^ (z >> np.uint64(31))


def substream_states(seed: int, indices: np.ndarray) -> np.ndarray:
    """Initial states of substream(seed, k) for each k in `indices`."""
    idx = indices.astype(np.uint64) + np.uint64(1)
    return _mix64_np(np.uint64(seed & _MASK) + idx * _NP_GOLDEN)


def draw_matrix_u64(states: np.ndarray, ndraws: int) -> np.ndarray:
    """Row s, column j = j-th next_u64() of the stream with initial state s."""
    counters = (np.arange(1, ndraws + 1, dtype=np.uint64) * _NP_GOLDEN)[None, :]
    return _mix64_np(states[:, None] + counters)


def u64_to_unit(x: np.ndarray) -> np.ndarray:
    """Map u64 draws to uniform doubles in [0, 1) (same mapping as scalar)."""
    return (x >> np.uint64(11)).astype(np.float64) * _INV53
