"""Monte Carlo collection with insert, delete, and retrieve-some-element.

Each copy of the sketch assigns every element a geometric level (level i
with probability 2^-i, derived deterministically from a seeded 64-bit
hash) and keeps, per level, the XOR of all live elements at that level
together with an exact counter.  Retrieval inspects the top occupied
level: when its counter is exactly 1 the mask *is* a live element.
Several independent copies are kept so that retrieval succeeds with
high probability; a miss across every copy is reported as ``FAILURE``.

Deleting elements chosen as a function of earlier retrievals voids the
success guarantee (the level distribution of survivors is skewed); the
callers in this package only delete on externally driven updates.
"""

from __future__ import annotations

import math
from typing import Iterable, Optional, Set

import numpy as np

U64 = np.uint64
_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class Failure:
    """Singleton marker: every sketch copy declined to yield an element."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "FAILURE"


FAILURE = Failure()


def mix64(x: int) -> int:
    """Avalanche a 64-bit value (splitmix64 finalizer)."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * _MIX1) & _MASK64
    x = ((x ^ (x >> 27)) * _MIX2) & _MASK64
    return x ^ (x >> 31)


def derive_seeds(base: int, n: int) -> np.ndarray:
    """``n`` decorrelated 64-bit seeds derived from ``base``."""
    out = np.empty(n, dtype=U64)
    s = mix64(base)
    for i in range(n):
        s = mix64(s + _GOLDEN)
        out[i] = s
    return out


def level_of(x: int, seed: int) -> int:
    """Geometric level of ``x`` under ``seed``: P[level = i] = 2^-i.

    Computed as 1 + (trailing zero bits of a seeded hash), capped at 64,
    so the level is a pure function of (x, seed).
    """
    h = mix64((x ^ seed) & _MASK64)
    if h == 0:
        return 64
    return min(64, 1 + ((h & -h).bit_length() - 1))


def _levels_np(xs: np.ndarray, seeds: np.ndarray) -> np.ndarray:
    """Vectorized :func:`level_of`: levels[i, j] for seeds[i] and xs[j]."""
    z = xs[None, :] ^ seeds[:, None]
    z = (z ^ (z >> U64(30))) * U64(_MIX1)
    z = (z ^ (z >> U64(27))) * U64(_MIX2)
    z = z ^ (z >> U64(31))
    low = z & (~z + U64(1))  # isolate lowest set bit
    # popcount(low - 1) counts the trailing zeros; a zero hash wraps to
    # 64 ones and lands on the level cap
    lv = np.bitwise_count(low - U64(1)).astype(np.int64) + 1
    np.minimum(lv, 64, out=lv)
    return lv


class Sampler:
    """A bank of independent sketch copies over distinct 64-bit values.

    ``n_bound`` is an upper bound on how many elements will ever be live
    at once; the number of copies is ``c * ceil(log2 n_bound)`` (at least
    ``c``).  All state is a deterministic function of the seed and the
    operation sequence.
    """

    __slots__ = ("n_bound", "c", "seeds", "ncopies", "masks", "counts",
                 "live", "_members", "_rows", "_lvcache")

    def __init__(self, n_bound: int, c: int = 2, seed: int = 0,
                 track_members: bool = False):
        self.n_bound = n_bound
        self.c = c
        self.ncopies = c * max(1, math.ceil(math.log2(max(2, n_bound))))
        self.seeds = derive_seeds(seed, self.ncopies)
        self.masks = np.zeros((self.ncopies, 4), dtype=U64)
        self.counts = np.zeros((self.ncopies, 4), dtype=np.int64)
        self.live = 0
        self._members: Optional[Set[int]] = set() if track_members else None
        self._rows = np.arange(self.ncopies)
        self._lvcache: dict = {}

    # -- level bookkeeping ----------------------------------------------------

    def _grow(self, need: int) -> None:
        have = self.masks.shape[1]
        if need <= have:
            return
        width = have
        while width < need:
            width *= 2
        self.masks = np.pad(self.masks, ((0, 0), (0, width - have)))
        self.counts = np.pad(self.counts, ((0, 0), (0, width - have)))

    def _apply(self, x: int, sign: int) -> None:
        cols = self._lvcache.get(x)
        if cols is None:
            if len(self._lvcache) > 512:
                self._lvcache.clear()
            cols = _levels_np(np.array([x], dtype=U64), self.seeds)[:, 0] - 1
            self._lvcache[x] = cols
        self._grow(int(cols.max()) + 1)
        self.masks[self._rows, cols] ^= U64(x)
        self.counts[self._rows, cols] += sign

    # -- collection interface -------------------------------------------------

    def insert(self, x: int) -> None:
        """Add ``x``; the caller guarantees it is not currently live."""
        self._apply(x, 1)
        self.live += 1
        if self._members is not None:
            self._members.add(x)

    def delete(self, x: int) -> None:
        """Remove ``x``; the caller guarantees it is currently live."""
        self._apply(x, -1)
        self.live -= 1
        if self._members is not None:
            self._members.discard(x)

    def batch_insert(self, xs: Iterable[int]) -> None:
        """Insert many distinct values at once (state equals sequential inserts)."""
        arr = np.asarray(list(xs), dtype=U64)
        if arr.size == 0:
            return
        lv = _levels_np(arr, self.seeds)
        self._grow(int(lv.max()))
        rows = np.repeat(np.arange(self.ncopies), arr.size)
        cols = (lv - 1).ravel()
        vals = np.tile(arr, self.ncopies)
        np.bitwise_xor.at(self.masks, (rows, cols), vals)
        np.add.at(self.counts, (rows, cols), 1)
        self.live += arr.size
        if self._members is not None:
            self._members.update(int(v) for v in arr)

    def retrieve(self):
        """Some live element, or ``None`` when empty, or ``FAILURE``.

        Scans the copies in order and returns the first whose counter at
        its top occupied level is exactly 1; the mask there is then an
        exact live element because the counters are exact.
        """
        if self.live == 0:
            return None
        occupied = self.counts > 0
        # every copy holds all live elements, so each row has a top level
        top = occupied.shape[1] - 1 - np.argmax(occupied[:, ::-1], axis=1)
        rows = np.arange(self.ncopies)
        hits = np.nonzero(self.counts[rows, top] == 1)[0]
        if hits.size == 0:
            return FAILURE
        i = int(hits[0])
        return int(self.masks[i, top[i]])

    # -- inspection helpers (tests / verification) -----------------------------

    @property
    def members(self) -> Set[int]:
        if self._members is None:
            raise RuntimeError("sampler built without track_members")
        return self._members

    def state_equals(self, other: "Sampler") -> bool:
        w = max(self.masks.shape[1], other.masks.shape[1])
        a = np.pad(self.masks, ((0, 0), (0, w - self.masks.shape[1])))
        b = np.pad(other.masks, ((0, 0), (0, w - other.masks.shape[1])))
        ca = np.pad(self.counts, ((0, 0), (0, w - self.counts.shape[1])))
        cb = np.pad(other.counts, ((0, 0), (0, w - other.counts.shape[1])))
        return (self.live == other.live and np.array_equal(a, b)
                and np.array_equal(ca, cb))
