"""Brute-force reference queries and the differential test driver.

Everything here recomputes answers with plain scans over a flat list,
deliberately sharing no state or code path with the main structure, so
it can serve as ground truth.  The driver replays a random interleaving
of edits and queries against both sides and reports the first
divergence; answers are validated by frequency and membership (any
witness of the optimal frequency is acceptable), never by identity.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import List, Optional, Set, Tuple

import numpy as np

from . import RangeFrequencyArray
from .xor_sampler import FAILURE, Sampler
from .k_frequency import _cell_seed


class ReferenceArray:
    """Flat list mirror with scan-based query answers."""

    def __init__(self, colors):
        self.data: List[int] = list(colors)

    def __len__(self) -> int:
        return len(self.data)

    def set(self, rank: int, c: int) -> None:
        self.data[rank] = c

    def insert(self, rank: int, c: int) -> None:
        self.data.insert(rank, c)

    def delete(self, rank: int) -> None:
        del self.data[rank]

    def range_counts(self, l: int, r: int) -> Counter:
        return Counter(self.data[l:r + 1])

    def count_in_range(self, c: int, l: int, r: int) -> int:
        return self.data[l:r + 1].count(c)

    def mode(self, l: int, r: int) -> Tuple[int, Set[int]]:
        counts = self.range_counts(l, r)
        best = max(counts.values())
        return best, {c for c, k in counts.items() if k == best}

    def least_frequent_zero(self, l: int, r: int) -> Tuple[int, Set[int]]:
        counts = self.range_counts(l, r)
        present = set(self.data)
        best = min(counts.get(c, 0) for c in present)
        return best, {c for c in present if counts.get(c, 0) == best}

    def least_frequent_present(self, l: int, r: int) -> Tuple[int, Set[int]]:
        counts = self.range_counts(l, r)
        best = min(counts.values())
        return best, {c for c, k in counts.items() if k == best}

    def k_frequency(self, l: int, r: int, k: int) -> Set[int]:
        counts = self.range_counts(l, r)
        return {c for c, f in counts.items() if f == k}

    def count_with_frequency(self, l: int, r: int, k: int, relation: str) -> int:
        counts = self.range_counts(l, r)
        if relation == "below":
            return sum(1 for f in counts.values() if f < k)
        if relation == "at":
            return sum(1 for f in counts.values() if f == k)
        return sum(1 for f in counts.values() if f > k)


# -- structural recount ---------------------------------------------------------

def verify_structures(arr: RangeFrequencyArray) -> List[str]:
    """Recount every maintained structure from the raw slots.

    Returns a list of violation descriptions (empty when consistent).
    """
    ix = arr.base
    bad: List[str] = []
    live = [(i, ix.slots[i]) for i in ix.iter_live()]
    totals = Counter(c for _, c in live)

    if sum(ix.seg_live) != ix.live or len(live) != ix.live:
        bad.append("live-count mismatch")
    if totals != Counter(ix.counts):
        bad.append("registry totals mismatch")
    if {c for c, k in totals.items() if k > ix.T} != ix.freq_set:
        bad.append("frequent flags mismatch")
    if sorted(totals) != ix.colors_sorted or sorted(ix.freq_set) != ix.freq_sorted:
        bad.append("sorted registries mismatch")

    # occurrence lists and handle coherence
    occ_of = {}
    for i, c in live:
        occ_of.setdefault(c, []).append(i)
    if set(occ_of) != set(ix.occ):
        bad.append("occurrence-list keys mismatch")
    for c, expect in occ_of.items():
        d = ix.occ.get(c)
        if d is None or list(d) != expect:
            bad.append(f"occurrence list of color {c} mismatch")
    for i, c in live:
        h = ix.handles[i]
        d = ix.occ[c]
        if h is None or d.get(d.rank_of(h)) != i:
            bad.append(f"handle at slot {i} does not resolve")
            break

    # dense remap for histogram recounts
    colors = sorted(totals)
    cid = {c: t for t, c in enumerate(colors)}
    ncol = len(colors)
    slots_arr = np.full(len(ix.slots), -1, dtype=np.int64)
    for i, c in live:
        slots_arr[i] = cid[c]
    infreq_mask = np.array([totals[c] <= ix.T for c in colors], dtype=bool)
    seg_colors = []
    for s in range(ix.S):
        seg = slots_arr[ix.bounds[s]:ix.bounds[s] + ix.cap]
        mask = np.zeros(ncol, dtype=bool)
        mask[seg[seg >= 0]] = True
        seg_colors.append(mask)

    n_inf = int(infreq_mask.sum())
    for j1, j2, pid in zip(ix.pair_j1.tolist(), ix.pair_j2.tolist(),
                           ix.pair_ids.tolist()):
        span = slots_arr[ix.bounds[j1]:ix.bounds[j2]]
        span = span[span >= 0]
        per_color = np.bincount(span, minlength=ncol) if ncol else np.zeros(0, int)
        inf_counts = per_color[infreq_mask]
        hist = np.bincount(inf_counts, minlength=ix.T + 1)[:ix.T + 1]
        if n_inf and hist.sum() != n_inf:
            bad.append(f"span ({j1},{j2}): recount lost colors")
        if not np.array_equal(hist, ix.span_hist[pid]):
            bad.append(f"span histogram ({j1},{j2}) mismatch")
        keep = infreq_mask.copy()
        if j1 >= 1:
            keep &= ~seg_colors[j1 - 1]
        if j2 < ix.S:
            keep &= ~seg_colors[j2]
        inner = per_color[keep]
        inner = inner[inner >= 1]
        ghist = np.bincount(inner, minlength=ix.T + 1)[:ix.T + 1]
        ghist[0] = 0
        if not np.array_equal(ghist, arr.interior.hist[pid]):
            bad.append(f"interior histogram ({j1},{j2}) mismatch")

    # tight-span cells
    expect_cells = {}
    for c, idxs in occ_of.items():
        k = totals[c]
        if k > ix.T:
            continue
        j1 = idxs[0] // ix.cap
        j2 = idxs[-1] // ix.cap + 1
        expect_cells.setdefault((ix.pair_id(j1, j2), k), set()).add(c)
    if expect_cells != arr.tight.cells:
        bad.append("tight-span cells mismatch")
    sizes = np.zeros_like(arr.tight.sizes)
    for (pid, k), cs in expect_cells.items():
        sizes[pid, k] = len(cs)
    if not np.array_equal(sizes, arr.tight.sizes):
        bad.append("tight-span sizes mismatch")

    # prefix counts for frequent colors
    acc: Counter = Counter()
    pos = 0
    for j in range(1, ix.S + 1):
        while pos < len(live) and live[pos][0] < ix.bounds[j]:
            c = live[pos][1]
            if totals[c] > ix.T:
                acc[c] += 1
            pos += 1
        if dict(acc) != ix.prefix_freq[j]:
            bad.append(f"prefix counts at endpoint {j} mismatch")
    if ix.prefix_freq[0]:
        bad.append("prefix counts at endpoint 0 must be empty")

    # interior samplers: one per nonzero bucket, holding exactly its colors
    expect_members = {}
    for c, idxs in occ_of.items():
        k = totals[c]
        if k > ix.T:
            continue
        arr_occ = np.array(idxs, dtype=np.int64)
        pref = np.searchsorted(arr_occ, ix.bounds_np)
        segs = set(int(v) for v in np.unique(arr_occ // ix.cap))
        for j1, j2, pid in zip(ix.pair_j1.tolist(), ix.pair_j2.tolist(),
                               ix.pair_ids.tolist()):
            if j1 - 1 in segs or j2 in segs:
                continue
            cnt = int(pref[j2] - pref[j1])
            if cnt >= 1:
                expect_members.setdefault((pid, cnt), set()).add(c)
    if set(expect_members) != set(arr.interior.samplers):
        bad.append("sampler cell keys mismatch")
    else:
        for key, cs in expect_members.items():
            smp = arr.interior.samplers[key]
            if smp.live != len(cs):
                bad.append(f"sampler {key} live count mismatch")
                continue
            ref = Sampler(ix.n_f, c=ix.sampler_c,
                          seed=_cell_seed(ix.master_seed, *key))
            ref.batch_insert(sorted(cs))
            if not smp.state_equals(ref):
                bad.append(f"sampler {key} sketch state mismatch")
            if smp._members is not None and smp._members != cs:
                bad.append(f"sampler {key} member set mismatch")

    return bad


# -- differential driver ----------------------------------------------------------

_OPS = ("SET", "INS", "DEL", "MODE", "LFZ", "LFP", "KFREQ", "COUNTF")
_WEIGHTS = (15, 10, 10, 20, 15, 10, 10, 10)


@dataclass
class Report:
    seed: int
    ops_run: int = 0
    passed: bool = True
    first_divergence: Optional[str] = None
    sampling_failures: int = 0
    recount_violations: int = 0
    op_counts: Counter = field(default_factory=Counter)
    transcript: List[str] = field(default_factory=list)

    def to_text(self) -> str:
        lines = [f"seed={self.seed} ops={self.ops_run} "
                 f"passed={self.passed} sampling_failures={self.sampling_failures} "
                 f"recount_violations={self.recount_violations}"]
        if self.first_divergence:
            lines.append("first divergence: " + self.first_divergence)
            lines.extend("  " + t for t in self.transcript[-12:])
        return "\n".join(lines)


def differential_run(seed: int, n_ops: int, max_n: int, *,
                     alphabet: Optional[int] = None,
                     recount_every: Optional[int] = None,
                     sampler_c: int = 2,
                     track_members: bool = False,
                     keep_transcript: bool = True) -> Report:
    """Replay a reproducible random workload against structure and oracle.

    The op generator never looks at query outputs, so sampler deletions
    stay independent of retrievals as the interior samplers require.
    """
    rng = random.Random(seed)
    n0 = max(1, rng.randint(max_n // 2, max_n))
    sigma = alphabet or rng.choice([8, 16, max(2, max_n // 2), max(2, max_n)])
    colors = [rng.randrange(sigma) for _ in range(n0)]
    arr = RangeFrequencyArray(colors, seed=seed, sampler_c=sampler_c,
                              track_members=track_members)
    ref = ReferenceArray(colors)
    report = Report(seed=seed)

    def log(line: str) -> None:
        if keep_transcript:
            report.transcript.append(line)
            if len(report.transcript) > 64:
                del report.transcript[:32]

    def fail(msg: str) -> Report:
        report.passed = False
        report.first_divergence = msg
        log("DIVERGED: " + msg)
        return report

    for step in range(n_ops):
        op = rng.choices(_OPS, weights=_WEIGHTS)[0]
        n = len(ref)
        if n == 0 and op != "INS":
            op = "INS"
        if op in ("MODE", "LFZ", "LFP", "KFREQ", "COUNTF"):
            l = rng.randrange(n)
            r = rng.randint(l, n - 1)
        report.ops_run = step + 1
        report.op_counts[op] += 1

        if op == "SET":
            rank, c = rng.randrange(n), rng.randrange(sigma)
            log(f"SET {rank} {c}")
            arr.set(rank, c)
            ref.set(rank, c)
        elif op == "INS":
            rank, c = rng.randint(0, n), rng.randrange(sigma)
            log(f"INS {rank} {c}")
            arr.insert(rank, c)
            ref.insert(rank, c)
        elif op == "DEL":
            rank = rng.randrange(n)
            log(f"DEL {rank}")
            arr.delete(rank)
            ref.delete(rank)
        elif op == "MODE":
            log(f"MODE {l} {r}")
            got = arr.mode(l, r)
            want, _ = ref.mode(l, r)
            if got.frequency != want or ref.count_in_range(got.color, l, r) != want:
                return fail(f"MODE {l} {r}: got {got}, oracle best {want}")
        elif op == "LFZ":
            log(f"LFZ {l} {r}")
            got = arr.least_frequent_zero(l, r)
            want, _ = ref.least_frequent_zero(l, r)
            if (got.frequency != want or got.color not in set(ref.data)
                    or ref.count_in_range(got.color, l, r) != want):
                return fail(f"LFZ {l} {r}: got {got}, oracle best {want}")
        elif op == "LFP":
            log(f"LFP {l} {r}")
            got = arr.least_frequent_present(l, r)
            want, _ = ref.least_frequent_present(l, r)
            if got is FAILURE:
                report.sampling_failures += 1
            elif got.frequency != want or ref.count_in_range(got.color, l, r) != want:
                return fail(f"LFP {l} {r}: got {got}, oracle best {want}")
        elif op == "KFREQ":
            k = rng.randint(1, max(1, int(round(n ** (1 / 3))) + 2))
            log(f"KFREQ {l} {r} {k}")
            got = arr.k_frequency(l, r, k)
            want = ref.k_frequency(l, r, k)
            if got is FAILURE:
                report.sampling_failures += 1
            elif got is None:
                if want:
                    return fail(f"KFREQ {l} {r} {k}: got none, oracle {want}")
            elif got not in want:
                return fail(f"KFREQ {l} {r} {k}: got {got}, oracle {want}")
        else:
            k = rng.randint(1, max(1, int(round(n ** (1 / 3))) + 2))
            rel = rng.choice(("below", "at", "above"))
            log(f"COUNTF {l} {r} {k} {rel}")
            got = arr.count_with_frequency(l, r, k, rel)
            want = ref.count_with_frequency(l, r, k, rel)
            if got != want:
                return fail(f"COUNTF {l} {r} {k} {rel}: got {got}, oracle {want}")

        if recount_every and (step + 1) % recount_every == 0:
            bad = verify_structures(arr)
            if bad:
                report.recount_violations += len(bad)
                return fail(f"recount after op {step + 1}: {bad[:3]}")
        if arr.to_list() != ref.data:
            return fail(f"content mismatch after op {step + 1}")
    return report
