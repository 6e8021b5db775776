"""Range least-frequent queries where the answer may be absent from the range.

The minimum is taken over every color present anywhere in the array, so
a color with zero occurrences inside the query range is a legal answer.

Beyond the base histograms this needs one extra structure: for every
endpoint pair and total count ``f``, the set of infrequent colors whose
occurrences all fit in that span and nowhere tighter (their minimal
endpoint-aligned enclosing span).  Those cells let the query return an
identity directly whenever the least frequent color lives entirely
inside the inner span; otherwise a binary search over erased histograms
pins down a segment that must contain a witness occurrence.
"""

from __future__ import annotations

from typing import Dict, Optional, Set, Tuple

import numpy as np

from .base_index import BaseIndex
from .mode_query import QueryAnswer, scan_range_counts


class TightSpans:
    """Per (endpoint pair, total count) buckets of infrequent colors.

    Registers as a hook on the base index; each bucket move is O(1)
    because the color's current cell is remembered explicitly.
    """

    def __init__(self, ix: BaseIndex):
        self.ix = ix
        ix.hooks.append(self)
        self.rebuild()

    def rebuild(self) -> None:
        ix = self.ix
        nep = ix.S + 1
        self.sizes = np.zeros((nep * nep, ix.T + 1), dtype=np.int64)
        self.cells: Dict[Tuple[int, int], Set[int]] = {}
        self.color_cell: Dict[int, Tuple[int, int]] = {}
        for c, k in ix.counts.items():
            if c not in ix.freq_set:
                self._insert(c, k)

    def _cell_of(self, c: int, k: int) -> Tuple[int, int]:
        d = self.ix.occ[c]
        j1 = d.get(0) // self.ix.cap
        j2 = d.get(len(d) - 1) // self.ix.cap + 1
        return self.ix.pair_id(j1, j2), k

    def _insert(self, c: int, k: int) -> None:
        key = self._cell_of(c, k)
        self.cells.setdefault(key, set()).add(c)
        self.color_cell[c] = key
        self.sizes[key] += 1

    def _remove(self, c: int) -> None:
        key = self.color_cell.pop(c, None)
        if key is None:
            return
        bucket = self.cells[key]
        bucket.discard(c)
        if not bucket:
            del self.cells[key]
        self.sizes[key] -= 1

    # hook protocol ------------------------------------------------------------

    def before_update(self, c: int) -> None:
        pass

    def after_update(self, c: int) -> None:
        self._remove(c)
        k = self.ix.counts.get(c, 0)
        if 0 < k <= self.ix.T:
            self._insert(c, k)

    # queries --------------------------------------------------------------------

    def compute_erased(self, j1: int, j2: int, erase) -> np.ndarray:
        """Span histogram for (j1, j2) minus the contribution of ``erase``.

        ``erase`` maps infrequent colors to their sorted occurrence lists.
        The copy still covers frequency 0.
        """
        ix = self.ix
        row = ix.span_hist[ix.pair_id(j1, j2)].copy()
        lo, hi = ix.bounds[j1], ix.bounds[j2]
        for occ in erase.values():
            row[bisect_left(occ, hi) - bisect_left(occ, lo)] -= 1
        return row


def range_least_frequent_zero(ix: BaseIndex, tight: TightSpans,
                              l: int, r: int) -> QueryAnswer:
    """Least frequent color over rank range [l, r], zero allowed."""
    if not 0 <= l <= r < ix.live:
        raise IndexError(f"bad range [{l}, {r}] for size {ix.live}")
    il, ir = ix.rank_to_index(l), ix.rank_to_index(r)
    left, right = ix.endpoints_within(il, ir)
    if left >= right:
        return _small_range_lfz(ix, il, ir)

    best: Optional[int] = None
    best_f = None
    for c in ix.freq_sorted:
        f = ix.count_in_range(c, il, ir)
        if best_f is None or f < best_f:
            best, best_f = c, f

    # infrequent colors touching the flanks, counted over the whole range
    erase: Dict[int, np.ndarray] = {}
    for flank in (range(il, ix.bounds[left]), range(ix.bounds[right], ir + 1)):
        for i in flank:
            c = ix.slots[i]
            if c is not None and c not in ix.freq_set and c not in erase:
                erase[c] = ix.occ_array(c)
    for c, occ in erase.items():
        f = int(np.searchsorted(occ, ir + 1) - np.searchsorted(occ, il))
        if best_f is None or f < best_f:
            best, best_f = c, f

    row = tight.compute_erased(left, right, erase)
    nz = np.nonzero(row)[0]
    if nz.size == 0 or (best_f is not None and nz[0] >= best_f):
        return QueryAnswer(best, best_f)
    f0 = int(nz[0])

    # try colors living completely inside the inner span first
    if f0 >= 1:
        nep = ix.S + 1
        sub = tight.sizes.reshape(nep, nep, ix.T + 1)[left:right + 1,
                                                      left:right + 1, f0]
        hit = np.argwhere(sub > 0)
        if hit.size:
            j1, j2 = int(hit[0][0]) + left, int(hit[0][1]) + left
            color = next(iter(tight.cells[(ix.pair_id(j1, j2), f0)]))
            return QueryAnswer(color, f0)

    color = _search_witness(ix, tight, left, right, f0, erase)
    return QueryAnswer(color, f0)


def _search_witness(ix: BaseIndex, tight: TightSpans, left: int, right: int,
                    f0: int, erase: Dict[int, np.ndarray]) -> int:
    """Locate a non-erased infrequent color whose count in span
    (left, right) is exactly ``f0`` but whose occurrences extend outside.

    Extending the span rightward can only grow per-color counts, so the
    bucket at ``f0`` shrinks monotonically; a binary search finds the
    segment where some witness gains its next occurrence.  If the right
    side never drops, the witness extends leftward instead.
    """
    v0 = int(tight.compute_erased(left, right, erase)[f0])

    def right_drop(j) -> bool:
        return int(tight.compute_erased(left, j, erase)[f0]) < v0

    def left_drop(j) -> bool:
        return int(tight.compute_erased(j, right, erase)[f0]) < v0

    span_lo, span_hi = ix.bounds[left], ix.bounds[right] - 1
    if right < ix.S and right_drop(ix.S):
        lo, hi = right, ix.S  # predicate false at lo, true at hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if right_drop(mid):
                hi = mid
            else:
                lo = mid
        seg_lo, seg_hi = ix.bounds[hi - 1], ix.bounds[hi]
    else:
        if not (left > 0 and left_drop(0)):
            raise AssertionError("least-frequent witness search exhausted "
                                 "both sides; histograms are inconsistent")
        lo, hi = 0, left  # predicate true at lo, false at hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if left_drop(mid):
                lo = mid
            else:
                hi = mid
        seg_lo, seg_hi = ix.bounds[lo], ix.bounds[lo + 1]

    seen = set()
    for i in range(seg_lo, seg_hi):
        c = ix.slots[i]
        if c is None or c in seen or c in ix.freq_set or c in erase:
            continue
        seen.add(c)
        if ix.count_in_range(c, span_lo, span_hi) == f0:
            return c
    raise AssertionError("least-frequent witness missing from located segment")


def _small_range_lfz(ix: BaseIndex, il: int, ir: int) -> QueryAnswer:
    counts = scan_range_counts(ix, il, ir)
    if len(counts) < len(ix.counts):
        # some color of the array is absent from the range; the sorted
        # registry yields one within len(counts) + 1 probes
        for c in ix.colors_sorted:
            if c not in counts:
                return QueryAnswer(c, 0)
    color = min(counts, key=lambda c: (counts[c], c))
    return QueryAnswer(color, counts[color])
