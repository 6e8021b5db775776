"""Dynamic range-frequency queries in sublinear time.

:class:`RangeFrequencyArray` wires the segmented base index together
with its tight-span and interior maintenance hooks and exposes the
public rank-based operations: point set, positional insert/delete,
range mode, both least-frequent variants, exact-frequency search, and
frequency-threshold counting.

All coordinates are ranks over live elements, ranges are inclusive, and
mutation requires exclusive access (queries are read-only).
"""

from __future__ import annotations

from typing import List, Optional, Union

from . import edit_ops
from .base_index import BaseIndex
from .k_frequency import (InteriorIndex, count_with_frequency,
                          range_k_frequency, range_least_frequent_present)
from .least_frequent import TightSpans, range_least_frequent_zero
from .mode_query import QueryAnswer, range_mode
from .xor_sampler import FAILURE, Failure, Sampler

__all__ = [
    "RangeFrequencyArray", "QueryAnswer", "FAILURE", "Failure",
    "BaseIndex", "TightSpans", "InteriorIndex", "Sampler",
]


class RangeFrequencyArray:
    """Array of colors supporting sublinear range-frequency queries.

    Parameters
    ----------
    colors:
        Initial contents (non-negative integers).
    seed:
        Master seed for the interior samplers; a fixed seed makes the
        whole structure, including sampler state, fully reproducible.
    sampler_c:
        Copy multiplier for the samplers (more copies, fewer retrieval
        failures).
    track_members:
        Keep explicit per-sampler member sets for verification.
    """

    def __init__(self, colors, *, seed: int = 0, sampler_c: int = 2,
                 track_members: bool = False,
                 delta: Optional[int] = None, threshold: Optional[int] = None):
        self.base = BaseIndex(colors, seed=seed, sampler_c=sampler_c,
                              delta=delta, threshold=threshold)
        self.tight = TightSpans(self.base)
        self.interior = InteriorIndex(self.base, track_members=track_members)

    def __len__(self) -> int:
        return self.base.live

    def to_list(self) -> List[int]:
        return self.base.to_list()

    # -- mutation ---------------------------------------------------------------

    def set(self, rank: int, color: int) -> None:
        self.base.apply_set(rank, color)

    def insert(self, rank: int, color: int) -> None:
        edit_ops.insert_element(self.base, rank, color)

    def delete(self, rank: int) -> None:
        edit_ops.delete_element(self.base, rank)

    # -- queries ----------------------------------------------------------------

    def mode(self, l: int, r: int) -> QueryAnswer:
        return range_mode(self.base, l, r)

    def least_frequent_zero(self, l: int, r: int) -> QueryAnswer:
        return range_least_frequent_zero(self.base, self.tight, l, r)

    def least_frequent_present(self, l: int, r: int) -> Union[QueryAnswer, Failure]:
        return range_least_frequent_present(self.base, self.interior, l, r)

    def k_frequency(self, l: int, r: int, k: int) -> Union[int, None, Failure]:
        return range_k_frequency(self.base, self.interior, l, r, k)

    def count_with_frequency(self, l: int, r: int, k: int, relation: str) -> int:
        return count_with_frequency(self.base, self.interior, l, r, k, relation)
