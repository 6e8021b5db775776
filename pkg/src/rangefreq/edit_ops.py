"""Positional insert and delete in rank space.

Live slots form a contiguous prefix of every segment, so an insert only
shifts the tail of one segment backward by a slot (updating each moved
element's occurrence entry through its handle in O(1)) and a delete
shifts it forward.  Segments that fill up or fall under quarter
occupancy, and live counts drifting away from the frozen size
parameter, trigger a full rebuild; rebuilds are O(n^(4/3)) but needed
only every ~n^(2/3) edits, which keeps the amortized edit cost at
O(n^(2/3)).
"""

from __future__ import annotations

from .base_index import BaseIndex


def _shift_slot(ix: BaseIndex, src: int, dst: int) -> None:
    color = ix.slots[src]
    handle = ix.handles[src]
    ix.slots[dst] = color
    ix.handles[dst] = handle
    ix.slots[src] = None
    ix.handles[src] = None
    d = ix.occ[color]
    d.set(d.rank_of(handle), dst)
    ix.shift_moves += 1


def _locate_segment(ix: BaseIndex, rank: int):
    s, acc = 0, 0
    while s < ix.S - 1 and rank > acc + ix.seg_live[s]:
        acc += ix.seg_live[s]
        s += 1
    return s, rank - acc


def insert_element(ix: BaseIndex, rank: int, c: int) -> None:
    """Insert color ``c`` at ``rank``; later elements shift back by one."""
    if not 0 <= rank <= ix.live:
        raise IndexError(f"bad insert rank {rank} for size {ix.live}")
    s, off = _locate_segment(ix, rank)
    if ix.seg_live[s] >= ix.cap:
        ix.rebuild()
        s, off = _locate_segment(ix, rank)
    base = s * ix.cap
    for j in range(ix.seg_live[s] - 1, off - 1, -1):
        _shift_slot(ix, base + j, base + j + 1)
    ix.add_occurrence(base + off, c)
    maybe_rebuild(ix, touched=s)


def delete_element(ix: BaseIndex, rank: int) -> None:
    """Delete the element at ``rank``; later elements shift forward."""
    idx = ix.rank_to_index(rank)
    s, off = idx // ix.cap, idx % ix.cap
    tail = ix.seg_live[s]
    ix.remove_occurrence(idx)
    base = s * ix.cap
    for j in range(off + 1, tail):
        _shift_slot(ix, base + j, base + j - 1)
    maybe_rebuild(ix, touched=s)


def _segment_violated(ix: BaseIndex, s: int) -> bool:
    return ix.seg_live[s] >= ix.cap or 4 * ix.seg_live[s] < ix.cap


def maybe_rebuild(ix: BaseIndex, touched=None) -> bool:
    """Rebuild when occupancy bounds are breached; returns True if it ran.

    ``touched`` limits the segment check to one segment (only an edited
    segment can newly violate its bounds); the global live-count bounds
    against the frozen size parameter are always checked.
    """
    trigger = ix.live > 2 * ix.n_f or 2 * ix.live < ix.n_f
    if not trigger:
        if touched is not None:
            trigger = _segment_violated(ix, touched)
        else:
            trigger = any(_segment_violated(ix, s) for s in range(ix.S))
    if trigger:
        ix.rebuild()
        return True
    return False
