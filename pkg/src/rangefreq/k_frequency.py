"""Exact-frequency queries: find / count colors with a given range count.

For every endpoint pair the interior histogram counts infrequent colors
by their in-span frequency, excluding any color that also appears in the
segment immediately left or right of the span.  Those excluded colors
are exactly the ones a query can afford to inspect directly (they live
in at most two segments), while each histogram bucket carries an XOR
sampler so a bucket hit can be turned back into a concrete color.

Sampler retrieval is Monte Carlo: a query that needs it may report
``FAILURE`` instead of an answer, and repeated deletes keyed off past
retrievals void the distribution (updates must not depend on query
results).  The counting variant never touches samplers and carries no
such caveat.
"""

from __future__ import annotations

from typing import Dict, Optional, Set, Tuple

import numpy as np

from .base_index import BaseIndex
from .mode_query import QueryAnswer, scan_range_counts
from .xor_sampler import FAILURE, Sampler, mix64

_CELL_SALT = 0xC2B2AE3D27D4EB4F


def _cell_seed(master: int, pid: int, f: int) -> int:
    return mix64(mix64(master ^ (pid * _CELL_SALT)) + f)


class InteriorIndex:
    """Interior histogram plus per-bucket samplers, maintained as a hook."""

    def __init__(self, ix: BaseIndex, track_members: bool = False):
        self.ix = ix
        self.track_members = track_members
        ix.hooks.append(self)
        self.rebuild()

    # -- construction -----------------------------------------------------------

    def rebuild(self) -> None:
        ix = self.ix
        nep = ix.S + 1
        self.hist = np.zeros((nep * nep, ix.T + 1), dtype=np.int64)
        self.samplers: Dict[Tuple[int, int], Sampler] = {}
        self._pending: Dict[int, Optional[np.ndarray]] = {}
        members: Dict[Tuple[int, int], list] = {}
        for c in ix.counts:
            if c in ix.freq_set:
                continue
            vec = self._contrib_vec(c)
            live = vec >= 0
            ix._scatter_hist(self.hist, ix.pair_ids[live], vec[live], +1)
            for pid, f in zip(ix.pair_ids[live].tolist(), vec[live].tolist()):
                members.setdefault((pid, f), []).append(c)
        for key, colors in members.items():
            smp = self._new_sampler(key)
            smp.batch_insert(colors)
            self.samplers[key] = smp

    def _new_sampler(self, key: Tuple[int, int]) -> Sampler:
        return Sampler(self.ix.n_f, c=self.ix.sampler_c,
                       seed=_cell_seed(self.ix.master_seed, *key),
                       track_members=self.track_members)

    def _contrib_vec(self, c: int) -> np.ndarray:
        """Per endpoint pair: interior count of ``c``, or -1 when it does
        not count there (absent from the span, or adjacent-excluded)."""
        ix = self.ix
        occ = ix.occ_array(c)
        pref = ix.prefix_vector(occ)
        exl, exr = ix.exclusion_vectors(occ)
        j1, j2 = ix.pair_j1, ix.pair_j2
        cnt = pref[j2] - pref[j1]
        valid = (cnt >= 1) & ~exl[j1] & ~exr[j2]
        return np.where(valid, cnt, -1)

    # -- hook protocol ------------------------------------------------------------

    def before_update(self, c: int) -> None:
        if 0 < self.ix.counts.get(c, 0) <= self.ix.T:
            self._pending[c] = self._contrib_vec(c)
        else:
            self._pending[c] = None

    def after_update(self, c: int) -> None:
        ix = self.ix
        old = self._pending.pop(c, None)
        if 0 < ix.counts.get(c, 0) <= ix.T:
            new = self._contrib_vec(c)
        else:
            new = None
        if old is None and new is None:
            return
        if old is None:
            old = np.full(ix.pair_ids.shape, -1, dtype=np.int64)
        if new is None:
            new = np.full(ix.pair_ids.shape, -1, dtype=np.int64)
        changed = old != new
        rm = changed & (old >= 0)
        ad = changed & (new >= 0)
        ix._scatter_hist(self.hist, ix.pair_ids[rm], old[rm], -1)
        ix._scatter_hist(self.hist, ix.pair_ids[ad], new[ad], +1)
        for pid, f in zip(ix.pair_ids[rm].tolist(), old[rm].tolist()):
            key = (pid, f)
            smp = self.samplers[key]
            smp.delete(c)
            if smp.live == 0:
                del self.samplers[key]
        for pid, f in zip(ix.pair_ids[ad].tolist(), new[ad].tolist()):
            key = (pid, f)
            smp = self.samplers.get(key)
            if smp is None:
                smp = self.samplers[key] = self._new_sampler(key)
            smp.insert(c)


def _adjacent_candidates(ix: BaseIndex, il: int, ir: int, left: int, right: int):
    """Exact range counts for colors occurring in the segments adjacent
    to the inner span, plus the full set of colors seen there.

    A color with any in-range occurrence is anchored at its first or last
    one (possibly found from an out-of-range slot whose neighbor in the
    occurrence list falls inside), so its count over [il, ir] is exact.
    """
    counted: Dict[int, int] = {}
    seen: Set[int] = set()
    segs = []
    if left >= 1:
        base = ix.bounds[left] - ix.cap
        segs.append((base, ix.bounds[left]))
    if right < ix.S:
        segs.append((ix.bounds[right], ix.bounds[right] + ix.cap))
    for lo, hi in segs:
        for i in range(lo, hi):
            c = ix.slots[i]
            if c is None:
                continue
            seen.add(c)
            if c in counted:
                continue
            d = ix.occ[c]
            rk = d.rank_of(ix.handles[i])
            if i < il:
                anchored = rk + 1 < len(d) and il <= d.get(rk + 1) <= ir
            elif i > ir:
                anchored = rk >= 1 and il <= d.get(rk - 1) <= ir
            else:
                anchored = (rk == 0 or d.get(rk - 1) < il
                            or rk == len(d) - 1 or d.get(rk + 1) > ir)
            if anchored:
                counted[c] = ix.count_in_range(c, il, ir)
    return counted, seen


def range_k_frequency(ix: BaseIndex, interior: InteriorIndex,
                      l: int, r: int, k: int):
    """A color occurring exactly ``k`` times in rank range [l, r].

    Returns the color, or ``None`` when no color qualifies, or ``FAILURE``
    on the (low probability) event that every sampler copy declines.
    """
    if k < 1:
        raise ValueError("k must be >= 1; use the least-frequent-zero query "
                         "for absent colors")
    if not 0 <= l <= r < ix.live:
        raise IndexError(f"bad range [{l}, {r}] for size {ix.live}")
    il, ir = ix.rank_to_index(l), ix.rank_to_index(r)
    left, right = ix.endpoints_within(il, ir)
    if left >= right:
        counts = scan_range_counts(ix, il, ir)
        hits = [c for c, f in counts.items() if f == k]
        return min(hits) if hits else None

    counted, seen = _adjacent_candidates(ix, il, ir, left, right)
    for c, f in counted.items():
        if f == k:
            return c
    fl, fr = ix.prefix_freq[left], ix.prefix_freq[right]
    for c in ix.freq_sorted:
        if c not in seen and fr.get(c, 0) - fl.get(c, 0) == k:
            return c
    if k <= ix.T:
        pid = ix.pair_id(left, right)
        if interior.hist[pid, k] > 0:
            got = interior.samplers[(pid, k)].retrieve()
            return got if got is not None else FAILURE
    return None


def range_least_frequent_present(ix: BaseIndex, interior: InteriorIndex,
                                 l: int, r: int):
    """Least frequent among colors with at least one occurrence in [l, r].

    Returns a :class:`QueryAnswer`, or ``FAILURE`` when only a sampler
    could name the winning color and every copy declines.
    """
    if not 0 <= l <= r < ix.live:
        raise IndexError(f"bad range [{l}, {r}] for size {ix.live}")
    il, ir = ix.rank_to_index(l), ix.rank_to_index(r)
    left, right = ix.endpoints_within(il, ir)
    if left >= right:
        counts = scan_range_counts(ix, il, ir)
        color = min(counts, key=lambda c: (counts[c], c))
        return QueryAnswer(color, counts[color])

    counted, seen = _adjacent_candidates(ix, il, ir, left, right)
    best: Optional[int] = None
    best_f: Optional[int] = None
    for c, f in counted.items():
        if f >= 1 and (best_f is None or f < best_f or (f == best_f and c < best)):
            best, best_f = c, f
    fl, fr = ix.prefix_freq[left], ix.prefix_freq[right]
    for c in ix.freq_sorted:
        if c in seen:
            continue
        f = fr.get(c, 0) - fl.get(c, 0)
        if f >= 1 and (best_f is None or f < best_f):
            best, best_f = c, f

    pid = ix.pair_id(left, right)
    nz = np.nonzero(interior.hist[pid, 1:])[0]
    if nz.size:
        f3 = int(nz[0]) + 1
        if best_f is None or f3 < best_f:
            got = interior.samplers[(pid, f3)].retrieve()
            if got is None:
                return FAILURE
            return QueryAnswer(got, f3)
    return QueryAnswer(best, best_f)


def count_with_frequency(ix: BaseIndex, interior: InteriorIndex,
                         l: int, r: int, k: int, relation: str) -> int:
    """Number of distinct colors whose count in [l, r] is below/at/above ``k``.

    Colors absent from the range never count.  No samplers involved, so
    the result is exact and carries no independence assumption.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if relation not in ("below", "at", "above"):
        raise ValueError(f"bad relation {relation!r}")
    if not 0 <= l <= r < ix.live:
        raise IndexError(f"bad range [{l}, {r}] for size {ix.live}")
    il, ir = ix.rank_to_index(l), ix.rank_to_index(r)
    left, right = ix.endpoints_within(il, ir)

    def tally(freqs) -> int:
        if relation == "below":
            return sum(1 for f in freqs if 1 <= f < k)
        if relation == "at":
            return sum(1 for f in freqs if f == k)
        return sum(1 for f in freqs if f > k)

    if left >= right:
        return tally(scan_range_counts(ix, il, ir).values())

    counted, seen = _adjacent_candidates(ix, il, ir, left, right)
    total = tally(counted.values())
    fl, fr = ix.prefix_freq[left], ix.prefix_freq[right]
    total += tally(fr.get(c, 0) - fl.get(c, 0)
                   for c in ix.freq_sorted if c not in seen)
    row = interior.hist[ix.pair_id(left, right)]
    if relation == "below":
        total += int(row[1:min(k, ix.T + 1)].sum())
    elif relation == "at":
        total += int(row[k]) if k <= ix.T else 0
    else:
        total += int(row[k + 1:].sum()) if k < ix.T else 0
    return total
