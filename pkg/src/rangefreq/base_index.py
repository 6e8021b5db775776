"""Core segmented index over a dynamic array of colors.

The logical array is stored as fixed segments of ``2 * delta`` slots
(``delta ~ n^(2/3)``), each at most half full right after a rebuild, so
positional inserts only shuffle one segment.  Segment boundaries are the
*endpoints*; the region between endpoints ``j1 < j2`` is a *span*.  Public
coordinates are ranks (live elements only); internals use slot indices.

Per present color the index keeps a sorted occurrence list with stable
handles (so the occurrence rank of any slot is O(1)), and it maintains:

* a per-span histogram counting, for every frequency ``0..T``, how many
  infrequent colors occur exactly that often inside the span,
* per-endpoint prefix counts for every frequent color.

``T ~ n^(1/3)`` splits colors into frequent (total count > T) and
infrequent; both T and the segment geometry are frozen between rebuilds.
Downstream structures (tight-span lists, interior histograms/samplers)
register as hooks and are notified around every single-color change.
"""

from __future__ import annotations

from bisect import bisect_left, insort
from collections import Counter
from typing import Dict, List, NamedTuple, Optional

import numpy as np

from .dynarray import TieredSeq


class FreqTest(NamedTuple):
    """Answers to "does this color occur >= f / <= f / exactly f times"."""

    at_least: bool
    at_most: bool
    exactly: bool


def _ceil_root(x: int, k: int) -> int:
    """Smallest r with r**k >= x, for x >= 1."""
    r = max(1, round(x ** (1.0 / k)))
    while r ** k < x:
        r += 1
    while r > 1 and (r - 1) ** k >= x:
        r -= 1
    return r


class BaseIndex:
    """Segmented array plus the frequency bookkeeping described above."""

    def __init__(self, colors, *, seed: int = 0, sampler_c: int = 2,
                 delta: Optional[int] = None, threshold: Optional[int] = None):
        self.master_seed = seed
        self.sampler_c = sampler_c
        self._forced_delta = delta
        self._forced_T = threshold
        self.hooks: list = []
        self.rebuild_count = 0
        self.rebuild_moves = 0
        self.shift_moves = 0
        self._build(list(colors))

    # -- construction ----------------------------------------------------------

    def _build(self, colors: List[int]) -> None:
        n = len(colors)
        self.n_f = max(n, 1)
        self.delta = self._forced_delta or _ceil_root(self.n_f * self.n_f, 3)
        self.T = self._forced_T or _ceil_root(self.n_f, 3)
        self.cap = 2 * self.delta
        self.S = max(1, -(-self.n_f // self.delta))
        nep = self.S + 1
        self.bounds = [j * self.cap for j in range(nep)]
        self.bounds_np = np.array(self.bounds, dtype=np.int64)
        j1, j2 = np.triu_indices(nep, k=1)
        self.pair_j1 = j1.astype(np.int64)
        self.pair_j2 = j2.astype(np.int64)
        self.pair_ids = self.pair_j1 * nep + self.pair_j2

        # even split keeps every segment comfortably inside its bounds
        self.slots: List[Optional[int]] = [None] * (self.S * self.cap)
        self.handles: List[Optional[object]] = [None] * (self.S * self.cap)
        self.seg_live = [0] * self.S
        q, r = divmod(n, self.S)
        pos = 0
        for s in range(self.S):
            take = q + (1 if s < r else 0)
            base = s * self.cap
            for off in range(take):
                self.slots[base + off] = colors[pos]
                pos += 1
            self.seg_live[s] = take
        self.live = n

        self.counts: Dict[int, int] = dict(Counter(colors))
        self.colors_sorted = sorted(self.counts)
        self.freq_set = {c for c, k in self.counts.items() if k > self.T}
        self.freq_sorted = sorted(self.freq_set)

        self.occ: Dict[int, TieredSeq] = {}
        for idx in self.iter_live():
            c = self.slots[idx]
            d = self.occ.get(c)
            if d is None:
                d = self.occ[c] = TieredSeq()
            self.handles[idx] = d.insert(len(d), idx)

        self._build_prefix_freq()
        self._build_span_hist()

    def _build_prefix_freq(self) -> None:
        self.prefix_freq: List[Dict[int, int]] = [{} for _ in range(self.S + 1)]
        acc: Dict[int, int] = {}
        slots, freq = self.slots, self.freq_set
        for j in range(1, self.S + 1):
            for idx in range(self.bounds[j - 1], self.bounds[j]):
                c = slots[idx]
                if c is not None and c in freq:
                    acc[c] = acc.get(c, 0) + 1
            self.prefix_freq[j] = dict(acc)

    def _build_span_hist(self) -> None:
        nep = self.S + 1
        self.span_hist = np.zeros((nep * nep, self.T + 1), dtype=np.int64)
        n_inf = len(self.counts) - len(self.freq_set)
        slots, freq = self.slots, self.freq_set
        for left in range(self.S):
            run = [0] * (self.T + 1)
            run[0] = n_inf
            seen: Dict[int, int] = {}
            for right in range(left + 1, nep):
                for idx in range(self.bounds[right - 1], self.bounds[right]):
                    c = slots[idx]
                    if c is not None and c not in freq:
                        k = seen.get(c, 0)
                        run[k] -= 1
                        seen[c] = k + 1
                        run[k + 1] += 1
                self.span_hist[left * nep + right] = run

    def rebuild(self) -> None:
        """Rebuild everything from the live contents; refreshes n_f, delta, T."""
        colors = self.to_list()
        self._build(colors)
        for hook in self.hooks:
            hook.rebuild()
        self.rebuild_count += 1
        self.rebuild_moves += len(colors)

    # -- geometry and coordinates ----------------------------------------------

    def pair_id(self, j1: int, j2: int) -> int:
        return j1 * (self.S + 1) + j2

    def segment_of(self, index: int) -> int:
        return index // self.cap

    def endpoints_within(self, il: int, ir: int):
        """Innermost endpoint pair (L, R) for the slot range [il, ir]."""
        left = -(-il // self.cap)
        right = (ir + 1) // self.cap
        return left, right

    def rank_to_index(self, rank: int) -> int:
        if not 0 <= rank < self.live:
            raise IndexError(f"rank {rank} out of range for size {self.live}")
        s, acc = 0, 0
        while acc + self.seg_live[s] <= rank:
            acc += self.seg_live[s]
            s += 1
        return s * self.cap + (rank - acc)

    def index_to_rank(self, index: int) -> int:
        s, off = divmod(index, self.cap)
        if not 0 <= s < self.S or off >= self.seg_live[s]:
            raise IndexError(f"index {index} is not a live slot")
        return sum(self.seg_live[:s]) + off

    def iter_live(self):
        """Live slot indices in order."""
        for s in range(self.S):
            base = s * self.cap
            yield from range(base, base + self.seg_live[s])

    def to_list(self) -> List[int]:
        out = []
        for s in range(self.S):
            base = s * self.cap
            out.extend(self.slots[base:base + self.seg_live[s]])
        return out

    # -- constant-time frequency probes ------------------------------------------

    def is_frequent(self, c: int) -> bool:
        return c in self.freq_set

    def count_in_range(self, c: int, lo: int, hi: int) -> int:
        """Occurrences of ``c`` in slot range [lo, hi], O(log n)."""
        d = self.occ.get(c)
        if d is None:
            return 0
        return d.lower_bound(hi + 1) - d.lower_bound(lo)

    def frequency_test(self, i: int, bound: int, f: int, side: str = "right") -> FreqTest:
        """Lemma-style probes anchored at live slot ``i`` (color ``A[i]``).

        ``side="right"``: counts occurrences in [i, bound];
        ``side="left"``: counts occurrences in [bound, i].  O(1).
        """
        if f < 1:
            raise ValueError("f must be >= 1")
        d = self.occ[self.slots[i]]
        r = d.rank_of(self.handles[i])
        n = len(d)
        if side == "right":
            ge_f = r + f - 1 < n and d.get(r + f - 1) <= bound
            ge_f1 = r + f < n and d.get(r + f) <= bound
        elif side == "left":
            ge_f = r - f + 1 >= 0 and d.get(r - f + 1) >= bound
            ge_f1 = r - f >= 0 and d.get(r - f) >= bound
        else:
            raise ValueError(f"bad side {side!r}")
        return FreqTest(ge_f, not ge_f1, ge_f and not ge_f1)

    def frequent_span_count(self, c: int, j1: int, j2: int) -> int:
        """Occurrences of frequent color ``c`` in span (j1, j2) via prefixes."""
        assert c in self.freq_set, "frequent_span_count needs a frequent color"
        return self.prefix_freq[j2].get(c, 0) - self.prefix_freq[j1].get(c, 0)

    # -- per-color span contributions (shared with the interior hook) -----------

    def occ_array(self, c: int) -> np.ndarray:
        return np.fromiter(self.occ[c], dtype=np.int64, count=len(self.occ[c]))

    def prefix_vector(self, occ_arr: np.ndarray) -> np.ndarray:
        """occurrences strictly before each endpoint boundary."""
        return np.searchsorted(occ_arr, self.bounds_np)

    def exclusion_vectors(self, occ_arr: np.ndarray):
        """Per-endpoint flags: span (j1, j2) must skip this color when the
        segment left of j1 / right of j2 holds one of its occurrences."""
        segs = np.unique(occ_arr // self.cap)
        nep = self.S + 1
        exl = np.zeros(nep, dtype=bool)
        exr = np.zeros(nep, dtype=bool)
        exl[segs + 1] = True
        exr[segs] = True
        return exl, exr

    def _scatter_hist(self, table: np.ndarray, pids, cnts, sign: int) -> None:
        flat = pids * table.shape[1] + cnts
        uniq, reps = np.unique(flat, return_counts=True)
        table.reshape(-1)[uniq] += sign * reps

    def _apply_span_delta(self, old_pref, new_pref) -> None:
        j1, j2, pids = self.pair_j1, self.pair_j2, self.pair_ids
        hist = self.span_hist
        if old_pref is not None and new_pref is not None:
            co = old_pref[j2] - old_pref[j1]
            cn = new_pref[j2] - new_pref[j1]
            moved = co != cn
            if not moved.any():
                return
            self._scatter_hist(hist, pids[moved], co[moved], -1)
            self._scatter_hist(hist, pids[moved], cn[moved], +1)
        elif old_pref is not None:
            self._scatter_hist(hist, pids, old_pref[j2] - old_pref[j1], -1)
        elif new_pref is not None:
            self._scatter_hist(hist, pids, new_pref[j2] - new_pref[j1], +1)

    # -- single-slot updates -----------------------------------------------------

    def add_occurrence(self, i: int, c: int) -> None:
        """Fill empty slot ``i`` with color ``c`` and restore every structure."""
        if self.slots[i] is not None:
            raise ValueError(f"slot {i} is occupied")
        if c < 0:
            raise ValueError("colors are non-negative integers")
        for hook in self.hooks:
            hook.before_update(c)

        old_k = self.counts.get(c, 0)
        new_k = old_k + 1
        old_infreq = 0 < old_k <= self.T
        new_infreq = new_k <= self.T
        old_pref = self.prefix_vector(self.occ_array(c)) if old_infreq else None

        d = self.occ.get(c)
        if d is None:
            d = self.occ[c] = TieredSeq()
            insort(self.colors_sorted, c)
        pos = d.lower_bound(i)
        self.handles[i] = d.insert(pos, i)
        self.slots[i] = c
        self.seg_live[i // self.cap] += 1
        self.live += 1
        self.counts[c] = new_k

        if new_k > self.T and old_k <= self.T:
            self.freq_set.add(c)
            insort(self.freq_sorted, c)
            pref = self.prefix_vector(self.occ_array(c))
            for j in range(1, self.S + 1):
                if pref[j] > 0:
                    self.prefix_freq[j][c] = int(pref[j])
        elif old_k > self.T:
            for j in range(i // self.cap + 1, self.S + 1):
                pf = self.prefix_freq[j]
                pf[c] = pf.get(c, 0) + 1

        new_pref = self.prefix_vector(self.occ_array(c)) if new_infreq else None
        self._apply_span_delta(old_pref, new_pref)

        for hook in self.hooks:
            hook.after_update(c)

    def remove_occurrence(self, i: int) -> None:
        """Empty live slot ``i`` and restore every structure."""
        c = self.slots[i]
        if c is None:
            raise ValueError(f"slot {i} is already empty")
        for hook in self.hooks:
            hook.before_update(c)

        old_k = self.counts[c]
        new_k = old_k - 1
        old_infreq = old_k <= self.T
        new_infreq = 0 < new_k <= self.T
        old_pref = self.prefix_vector(self.occ_array(c)) if old_infreq else None

        d = self.occ[c]
        d.delete(d.rank_of(self.handles[i]))
        self.handles[i] = None
        self.slots[i] = None
        self.seg_live[i // self.cap] -= 1
        self.live -= 1
        if new_k == 0:
            del self.counts[c]
            del self.occ[c]
            del self.colors_sorted[bisect_left(self.colors_sorted, c)]
        else:
            self.counts[c] = new_k

        if old_k > self.T and new_k <= self.T:
            self.freq_set.discard(c)
            del self.freq_sorted[bisect_left(self.freq_sorted, c)]
            for pf in self.prefix_freq:
                pf.pop(c, None)
        elif old_k > self.T:
            for j in range(i // self.cap + 1, self.S + 1):
                pf = self.prefix_freq[j]
                v = pf.get(c, 0) - 1
                if v:
                    pf[c] = v
                else:
                    pf.pop(c, None)

        new_pref = self.prefix_vector(self.occ_array(c)) if new_infreq else None
        self._apply_span_delta(old_pref, new_pref)

        for hook in self.hooks:
            hook.after_update(c)

    def apply_set(self, rank: int, c: int) -> None:
        """Replace the element at ``rank`` (public coordinate) with ``c``."""
        i = self.rank_to_index(rank)
        if self.slots[i] == c:
            return
        self.remove_occurrence(i)
        self.add_occurrence(i, c)
