"""Two-level tiered sequence with O(1) access and O(sqrt n) insert/delete.

The sequence is stored as a row of circular queues of ``m`` slots each.
Every queue except possibly the last is completely full, so the element
at rank ``r`` lives in queue ``r // m`` at in-queue rank ``r % m``.
Inserting into the middle of a queue shifts at most ``m`` elements and
then cascades one head-push/tail-pop per following queue, giving
O(m + count/m) = O(sqrt n) work per structural edit.

Each stored element owns a :class:`Handle` that the structure keeps
up to date whenever the element physically moves, so callers can ask
for the current rank of an element they inserted long ago in O(1).
"""

from __future__ import annotations

import math
from typing import Any, Iterator, List, Optional


class Handle:
    """Stable reference to one stored element.

    ``queue`` and ``slot`` always name the element's current physical
    position; the owning :class:`TieredSeq` rewrites them on every move.
    """

    __slots__ = ("queue", "slot")

    def __init__(self, queue: int, slot: int):
        self.queue = queue
        self.slot = slot

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Handle(queue={self.queue}, slot={self.slot})"


class TieredSeq:
    """Indexed dynamic sequence over circular queues.

    Parameters
    ----------
    values:
        Optional initial contents (appended in order).
    m:
        Queue capacity. When given, the value is frozen and automatic
        resizing is disabled (useful in tests); otherwise ``m`` tracks
        ``ceil(sqrt(n_f))`` for a frozen size parameter ``n_f`` that is
        refreshed whenever the count drifts outside ``[n_f/2, 2*n_f]``.
    """

    def __init__(self, values=(), m: Optional[int] = None):
        self._fixed_m = m is not None
        self.n_f = 1
        self.m = m if m is not None else 1
        if self.m < 1:
            raise ValueError("m must be positive")
        self.count = 0
        self.moves = 0  # physical relocations, for cost instrumentation
        self._vals: List[list] = []
        self._handles: List[list] = []
        self._heads: List[int] = []
        for v in values:
            self.insert(self.count, v)
        if not self._fixed_m:
            self._maybe_rebuild()

    # -- positional accessors -------------------------------------------------

    def __len__(self) -> int:
        return self.count

    def __iter__(self) -> Iterator[Any]:
        m = self.m
        for q in range(len(self._vals)):
            head, vals = self._heads[q], self._vals[q]
            for j in range(self._qsize(q)):
                yield vals[(head + j) % m]

    def _qsize(self, q: int) -> int:
        if q < len(self._vals) - 1:
            return self.m
        return self.count - self.m * (len(self._vals) - 1)

    def _check_rank(self, rank: int, upper: int) -> None:
        if not 0 <= rank < upper:
            raise IndexError(f"rank {rank} out of range for count {self.count}")

    def get(self, rank: int):
        """Element at ``rank``, O(1)."""
        self._check_rank(rank, self.count)
        q, off = divmod(rank, self.m)
        return self._vals[q][(self._heads[q] + off) % self.m]

    def set(self, rank: int, value) -> None:
        """Replace the element at ``rank`` in place; its handle is unchanged."""
        self._check_rank(rank, self.count)
        q, off = divmod(rank, self.m)
        self._vals[q][(self._heads[q] + off) % self.m] = value

    def rank_of(self, h: Handle) -> int:
        """Current rank of the element behind ``h``, O(1)."""
        return h.queue * self.m + (h.slot - self._heads[h.queue]) % self.m

    # -- structural edits -----------------------------------------------------

    def insert(self, rank: int, value) -> Handle:
        """Insert ``value`` at ``rank`` and return its handle."""
        if not 0 <= rank <= self.count:
            raise IndexError(f"rank {rank} out of range for count {self.count}")
        m = self.m
        h = Handle(-1, -1)
        q, off = divmod(rank, m)
        if q == len(self._vals):
            self._vals.append([None] * m)
            self._handles.append([None] * m)
            self._heads.append(0)
        carry = self._queue_insert(q, off, value, h)
        q += 1
        while carry is not None:
            if q == len(self._vals):
                self._vals.append([None] * m)
                self._handles.append([None] * m)
                self._heads.append(0)
            carry = self._queue_push_front(q, carry)
            q += 1
        self.count += 1
        if not self._fixed_m:
            self._maybe_rebuild()
        return h

    def delete(self, rank: int) -> None:
        """Remove the element at ``rank``; later elements shift forward."""
        self._check_rank(rank, self.count)
        m = self.m
        q, off = divmod(rank, m)
        self._queue_delete(q, off)
        # Pull queue heads backward until the vacancy sits in the last queue.
        for src in range(q + 1, len(self._vals)):
            head = self._heads[src]
            v = self._vals[src][head]
            h = self._handles[src][head]
            self._vals[src][head] = None
            self._handles[src][head] = None
            self._heads[src] = (head + 1) % m
            dst = src - 1
            tail = (self._heads[dst] + m - 1) % m
            self._vals[dst][tail] = v
            self._handles[dst][tail] = h
            h.queue, h.slot = dst, tail
            self.moves += 1
        self.count -= 1
        while self._vals and self._qsize(len(self._vals) - 1) == 0:
            self._vals.pop()
            self._handles.pop()
            self._heads.pop()
        if not self._fixed_m:
            self._maybe_rebuild()

    def lower_bound(self, key) -> int:
        """Smallest rank holding an element >= ``key``.

        The contents must already be sorted ascending; returns ``count``
        when every element is smaller.
        """
        lo, hi = 0, self.count
        while lo < hi:
            mid = (lo + hi) // 2
            if self.get(mid) < key:
                lo = mid + 1
            else:
                hi = mid
        return lo

    # -- queue-level helpers --------------------------------------------------

    def _queue_insert(self, q, off, value, h):
        """Insert at in-queue rank ``off``; return overflowing (value, handle)."""
        m = self.m
        head, vals, handles = self._heads[q], self._vals[q], self._handles[q]
        size = self._qsize(q) if q == len(self._vals) - 1 else m
        carry = None
        top = size
        if size == m:
            tail = (head + m - 1) % m
            carry = (vals[tail], handles[tail])
            top = m - 1
        for j in range(top - 1, off - 1, -1):
            src = (head + j) % m
            dst = (head + j + 1) % m
            vals[dst] = vals[src]
            mh = handles[dst] = handles[src]
            mh.slot = dst
            self.moves += 1
        slot = (head + off) % m
        vals[slot] = value
        handles[slot] = h
        h.queue, h.slot = q, slot
        return carry

    def _queue_push_front(self, q, carried):
        """Push (value, handle) onto the queue front; return popped tail if full."""
        m = self.m
        head = self._heads[q]
        vals, handles = self._vals[q], self._handles[q]
        size = self._qsize(q) if q == len(self._vals) - 1 else m
        carry = None
        slot = (head + m - 1) % m  # becomes the new head slot
        if size == m:
            carry = (vals[slot], handles[slot])
        v, h = carried
        vals[slot] = v
        handles[slot] = h
        h.queue, h.slot = q, slot
        self._heads[q] = slot
        self.moves += 1
        return carry

    def _queue_delete(self, q, off):
        m = self.m
        head, vals, handles = self._heads[q], self._vals[q], self._handles[q]
        size = self._qsize(q) if q == len(self._vals) - 1 else m
        for j in range(off + 1, size):
            src = (head + j) % m
            dst = (head + j - 1) % m
            vals[dst] = vals[src]
            mh = handles[dst] = handles[src]
            mh.slot = dst
            self.moves += 1
        last = (head + size - 1) % m
        vals[last] = None
        handles[last] = None

    # -- resizing -------------------------------------------------------------

    def _maybe_rebuild(self) -> None:
        if self.n_f // 2 <= self.count <= 2 * self.n_f:
            return
        self.n_f = max(self.count, 1)
        self._rebuild(max(1, math.isqrt(self.n_f - 1) + 1))

    def _rebuild(self, new_m: int) -> None:
        pairs = []
        m = self.m
        for q in range(len(self._vals)):
            head, vals, handles = self._heads[q], self._vals[q], self._handles[q]
            for j in range(self._qsize(q)):
                slot = (head + j) % m
                pairs.append((vals[slot], handles[slot]))
        self.m = new_m
        nq = (len(pairs) + new_m - 1) // new_m
        self._vals = [[None] * new_m for _ in range(nq)]
        self._handles = [[None] * new_m for _ in range(nq)]
        self._heads = [0] * nq
        for i, (v, h) in enumerate(pairs):
            q, slot = divmod(i, new_m)
            self._vals[q][slot] = v
            self._handles[q][slot] = h
            h.queue, h.slot = q, slot
            self.moves += 1
