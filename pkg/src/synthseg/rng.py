"""Counter-based random primitives.

Every draw is a pure function of its integer key words: there is no
generator state, so values never depend on call order, worker count, or
parallel schedule.  The scalar and vectorized variants share one 64-bit
mixing function (SplitMix64 finalizer over folded key words) and agree
bit-for-bit, i.e. ``unit_floats(n, *w)[i] == unit_float(*w, i)``.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_TO_UNIT = 2.0**-53


def tag_hash(tag: str) -> int:
    """FNV-1a hash of an attribute tag, usable as a key word."""
    h = _FNV_OFFSET
    for b in tag.encode("utf-8"):
        h = ((h ^ b) * _FNV_PRIME) & _MASK
    return h


def mix64(x: int) -> int:
    x = (x + _GAMMA) & _MASK
    x = ((x ^ (x >> 30)) * _MIX1) & _MASK
    x = ((x ^ (x >> 27)) * _MIX2) & _MASK
    return x ^ (x >> 31)


def fold(*words: int) -> int:
    """Fold any number of key words into one 64-bit key."""
    key = 0
    for w in words:
        key = mix64(key ^ (int(w) & _MASK))
    return key


def unit_float(*words: int) -> float:
    """Uniform draw in [0, 1) keyed by the given words."""
    return (fold(*words) >> 11) * _TO_UNIT


def uniform_in(lo: float, hi: float, *words: int) -> float:
    return lo + (hi - lo) * unit_float(*words)


def pick_index(n: int, *words: int) -> int:
    """Uniform integer in [0, n)."""
    if n <= 0:
        raise ValueError("pick_index needs n >= 1")
    i = int(unit_float(*words) * n)
    return min(i, n - 1)


def fair_coin(*words: int) -> bool:
    return unit_float(*words) < 0.5


def _mix64_v(x: np.ndarray) -> np.ndarray:
    x = (x + np.uint64(_GAMMA))
    x = (x ^ (x >> np.uint64(30))) * np.uint64(_MIX1)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(_MIX2)
    return x ^ (x >> np.uint64(31))


def unit_floats(counters, *words: int) -> np.ndarray:
    """Vectorized ``unit_float(*words, c)`` over an array of counters."""
    c = np.asarray(counters, dtype=np.uint64)
    keys = _mix64_v(np.uint64(fold(*words)) ^ c)
    return (keys >> np.uint64(11)).astype(np.float64) * _TO_UNIT


def gaussians(counters, *words: int) -> np.ndarray:
    """Standard normal draws, one per counter (Box-Muller)."""
    c = np.asarray(counters, dtype=np.uint64)
    u1 = unit_floats(c, *words, tag_hash("bm.u1"))
    u2 = unit_floats(c, *words, tag_hash("bm.u2"))
    return np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)


def permutation(n: int, *words: int) -> np.ndarray:
    """Deterministic Fisher-Yates permutation of range(n)."""
    idx = np.arange(n, dtype=np.int64)
    for i in range(n - 1, 0, -1):
        j = pick_index(i + 1, *words, i)
        idx[i], idx[j] = idx[j], idx[i]
    return idx
