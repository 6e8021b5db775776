"""Range mode queries over the segmented index.

The query range (in ranks) is converted to slot coordinates and split
into the innermost endpoint-aligned span plus up to two partial-segment
flanks.  Frequent colors are swept via prefix counts, flank elements are
probed with the constant-time occurrence tests (scanning the occurrence
list only when they beat the running best), and the span histogram
supplies the best infrequent span frequency, whose witness is pinned
down by walking endpoints leftward until its bucket count drops.
"""

from __future__ import annotations

from typing import Dict, NamedTuple, Optional

import numpy as np

from .base_index import BaseIndex


class QueryAnswer(NamedTuple):
    color: Optional[int]
    frequency: int


def scan_range_counts(ix: BaseIndex, il: int, ir: int) -> Dict[int, int]:
    """Exact color counts over slot range [il, ir] by direct scan."""
    counts: Dict[int, int] = {}
    slots = ix.slots
    for i in range(il, ir + 1):
        c = slots[i]
        if c is not None:
            counts[c] = counts.get(c, 0) + 1
    return counts


def small_range_mode(ix: BaseIndex, il: int, ir: int) -> QueryAnswer:
    """Direct-scan mode for ranges spanning fewer than two endpoints."""
    counts = scan_range_counts(ix, il, ir)
    color = max(counts, key=lambda c: (counts[c], -c))
    return QueryAnswer(color, counts[color])


def range_mode(ix: BaseIndex, l: int, r: int, _trace: Optional[dict] = None) -> QueryAnswer:
    """A color of maximum frequency in rank range [l, r], with that frequency."""
    if not 0 <= l <= r < ix.live:
        raise IndexError(f"bad range [{l}, {r}] for size {ix.live}")
    il, ir = ix.rank_to_index(l), ix.rank_to_index(r)
    left, right = ix.endpoints_within(il, ir)
    if left >= right:
        if _trace is not None:
            _trace["step"] = "small"
        return small_range_mode(ix, il, ir)

    best: Optional[int] = None
    best_f = 0
    step = None

    # 1: frequent colors by span prefix counts (flank occurrences, if any,
    # are made exact by step 2)
    fl, fr = ix.prefix_freq[left], ix.prefix_freq[right]
    for c in ix.freq_sorted:
        f = fr.get(c, 0) - fl.get(c, 0)
        if f > best_f:
            best, best_f, step = c, f, "frequent"

    # 2: flank elements, each probed against the running best
    for i in range(il, ix.bounds[left]):
        c = ix.slots[i]
        if c is None:
            continue
        d = ix.occ[c]
        rk = d.rank_of(ix.handles[i])
        n = len(d)
        if rk + best_f < n and d.get(rk + best_f) <= ir:
            k = rk + best_f + 1
            while k < n and d.get(k) <= ir:
                k += 1
            best, best_f, step = c, k - rk, "flank"
    for i in range(ix.bounds[right], ir + 1):
        c = ix.slots[i]
        if c is None:
            continue
        d = ix.occ[c]
        rk = d.rank_of(ix.handles[i])
        if rk - best_f >= 0 and d.get(rk - best_f) >= il:
            k = rk - best_f - 1
            while k >= 0 and d.get(k) >= il:
                k -= 1
            best, best_f, step = c, rk - k, "flank"

    # 3: best purely-inner infrequent frequency from the span histogram
    row = ix.span_hist[ix.pair_id(left, right)]
    nz = np.nonzero(row[1:])[0]
    fmax = int(nz[-1]) + 1 if nz.size else 0
    if fmax > best_f:
        best_f = fmax
        best = _inner_mode_witness(ix, left, right, fmax)
        step = "inner"

    if _trace is not None:
        _trace["step"] = step
    return QueryAnswer(best, best_f)


def _inner_mode_witness(ix: BaseIndex, left: int, right: int, f: int) -> int:
    """Identity of an infrequent color occurring ``f`` times in the span.

    Walk the right endpoint leftward; the first time the histogram bucket
    at ``f`` shrinks, the lost witness has an occurrence in the segment
    just stepped over, where a constant-time exactness probe finds it.
    """
    span_lo = ix.bounds[left]
    hist = ix.span_hist
    cur = right
    # bucket f of the shrinking span stays >= 1 until the witness's last
    # in-span occurrence is stepped over; the diagonal row is all zero,
    # so the drop happens no later than cur - 1 == left
    while hist[ix.pair_id(left, cur - 1)][f] >= hist[ix.pair_id(left, cur)][f]:
        cur -= 1
    # the witness's f-th in-span occurrence sits in this segment, and the
    # probe can only succeed there (a true answer at any slot certifies an
    # exact span count of f), so every live slot is probed
    for i in range(ix.bounds[cur - 1], ix.bounds[cur]):
        c = ix.slots[i]
        if c is None or c in ix.freq_set:
            continue
        if ix.frequency_test(i, span_lo, f, side="left").exactly:
            return c
    raise AssertionError("mode witness missing from located segment")
