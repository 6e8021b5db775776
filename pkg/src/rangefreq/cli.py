"""Command-line front end: scripted operations, verification, benchmarks.

Script grammar (one command per line, decimal numbers, inclusive ranks):

    SET <rank> <color> | INS <rank> <color> | DEL <rank>
    MODE <l> <r> | LFZ <l> <r> | LFP <l> <r>
    KFREQ <l> <r> <k> | COUNTF <l> <r> <k> <LT|EQ|GT>

Queries echo ``<CMD> <args> -> color=<id> freq=<f>`` (or ``-> none`` /
``-> sampling_failure``); COUNTF echoes ``-> count=<v>``.  Exit codes:
0 success, 1 verification divergence, 2 usage or script error.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from typing import List, Optional, Tuple

from . import RangeFrequencyArray
from .oracle import differential_run
from .xor_sampler import FAILURE

_REL = {"LT": "below", "EQ": "at", "GT": "above"}
_ARITY = {"SET": 2, "INS": 2, "DEL": 1, "MODE": 2, "LFZ": 2, "LFP": 2,
          "KFREQ": 3, "COUNTF": 4}


class ScriptError(Exception):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def parse_script(text: str) -> List[Tuple[int, str, list]]:
    """Parse a script into (lineno, command, args); blank lines are skipped."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split()
        if not parts:
            continue
        cmd, rest = parts[0].upper(), parts[1:]
        if cmd not in _ARITY:
            raise ScriptError(lineno, f"unknown command {parts[0]!r}")
        if len(rest) != _ARITY[cmd]:
            raise ScriptError(lineno, f"{cmd} takes {_ARITY[cmd]} arguments, "
                                      f"got {len(rest)}")
        args: list = []
        for tok in rest[:3] if cmd == "COUNTF" else rest:
            try:
                args.append(int(tok))
            except ValueError:
                raise ScriptError(lineno, f"bad integer {tok!r}") from None
        if cmd == "COUNTF":
            rel = rest[3].upper()
            if rel not in _REL:
                raise ScriptError(lineno, f"bad relation {rest[3]!r} "
                                          "(want LT, EQ, or GT)")
            args.append(rel)
        out.append((lineno, cmd, args))
    return out


def execute_script(arr: RangeFrequencyArray, script, out) -> None:
    for lineno, cmd, args in script:
        try:
            if cmd == "SET":
                arr.set(args[0], args[1])
            elif cmd == "INS":
                arr.insert(args[0], args[1])
            elif cmd == "DEL":
                arr.delete(args[0])
            elif cmd == "MODE":
                ans = arr.mode(args[0], args[1])
                _emit(out, cmd, args, ans)
            elif cmd == "LFZ":
                ans = arr.least_frequent_zero(args[0], args[1])
                _emit(out, cmd, args, ans)
            elif cmd == "LFP":
                ans = arr.least_frequent_present(args[0], args[1])
                _emit(out, cmd, args, ans)
            elif cmd == "KFREQ":
                got = arr.k_frequency(args[0], args[1], args[2])
                _emit(out, cmd, args, got, kfreq_k=args[2])
            else:
                v = arr.count_with_frequency(args[0], args[1], args[2],
                                             _REL[args[3]])
                print(f"COUNTF {args[0]} {args[1]} {args[2]} {args[3]} "
                      f"-> count={v}", file=out)
        except (IndexError, ValueError) as exc:
            raise ScriptError(lineno, str(exc)) from None


def _emit(out, cmd, args, result, kfreq_k: Optional[int] = None) -> None:
    head = f"{cmd} {' '.join(str(a) for a in args)} ->"
    if result is FAILURE:
        print(f"{head} sampling_failure", file=out)
    elif result is None:
        print(f"{head} none", file=out)
    elif kfreq_k is not None:
        print(f"{head} color={result} freq={kfreq_k}", file=out)
    else:
        print(f"{head} color={result.color} freq={result.frequency}", file=out)


# -- benchmark harness ------------------------------------------------------------

BENCH_OPS = ("MODE", "SET", "LFZ", "LFP", "KFREQ", "COUNTF", "INS", "DEL")
CSV_HEADER = "n,op,ops_run,mean_ns,p50_ns,p99_ns"


def mixed_colors(n: int, rng: random.Random) -> List[int]:
    """Mixed workload array: a hot narrow alphabet plus a thin tail of
    rare colors (about 2% of positions) so both frequent and infrequent
    code paths carry weight at every size."""
    t = max(1, round(n ** (1 / 3)))
    rare_occ = max(2, t // 2)
    n_rare_colors = max(1, (n // 50) // rare_occ)
    out = []
    for _ in range(n):
        if rng.random() < 0.02:
            out.append(64 + rng.randrange(n_rare_colors))
        else:
            out.append(rng.randrange(32))
    return out


def _percentile(sorted_ns: List[int], q: float) -> int:
    if not sorted_ns:
        return 0
    pos = min(len(sorted_ns) - 1, int(round(q * (len(sorted_ns) - 1))))
    return sorted_ns[pos]


def run_bench(sizes, seed: int = 0, sampler_c: int = 2, reps: int = 32):
    """Time each operation ``reps`` times per size; returns CSV-ready rows."""
    rows = []
    for n in sizes:
        rng = random.Random(seed + n)
        arr = RangeFrequencyArray(mixed_colors(n, rng), seed=seed,
                                  sampler_c=sampler_c)
        for op in BENCH_OPS:
            samples = []
            for _ in range(reps):
                size = len(arr)
                l = rng.randrange(size)
                r = rng.randint(l, size - 1)
                k = rng.randint(1, max(1, round(size ** (1 / 3))))
                c = mixed_colors(1, rng)[0]
                rel = rng.choice(("below", "at", "above"))
                t0 = time.perf_counter_ns()
                if op == "MODE":
                    arr.mode(l, r)
                elif op == "SET":
                    arr.set(l, c)
                elif op == "LFZ":
                    arr.least_frequent_zero(l, r)
                elif op == "LFP":
                    arr.least_frequent_present(l, r)
                elif op == "KFREQ":
                    arr.k_frequency(l, r, k)
                elif op == "COUNTF":
                    arr.count_with_frequency(l, r, k, rel)
                elif op == "INS":
                    arr.insert(l, c)
                else:
                    arr.delete(l)
                samples.append(time.perf_counter_ns() - t0)
            samples.sort()
            mean = sum(samples) // len(samples)
            rows.append((n, op, len(samples), mean,
                         _percentile(samples, 0.50), _percentile(samples, 0.99)))
    return rows


def write_csv(rows, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")


# -- entry point --------------------------------------------------------------------

def build_arg_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rangefreq",
        description="dynamic range mode / least-frequent / k-frequency queries")
    p.add_argument("--input", help="whitespace-separated color ids")
    p.add_argument("--script", help="operation script to execute")
    p.add_argument("--verify", action="store_true",
                   help="run seeded differential verification against the oracle")
    p.add_argument("--bench", action="store_true", help="run microbenchmarks")
    p.add_argument("--sizes", default="512,4096",
                   help="comma-separated array sizes for --bench")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sampler-c", type=int, default=2, dest="sampler_c")
    p.add_argument("--csv", help="write benchmark results to this file")
    return p


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    out = sys.stdout

    if args.bench:
        try:
            sizes = [int(s) for s in args.sizes.split(",") if s]
        except ValueError:
            print(f"bad --sizes {args.sizes!r}", file=sys.stderr)
            return 2
        rows = run_bench(sizes, seed=args.seed, sampler_c=args.sampler_c)
        if args.csv:
            write_csv(rows, args.csv)
        else:
            print(CSV_HEADER, file=out)
            for row in rows:
                print(",".join(str(v) for v in row), file=out)
        return 0

    if args.verify:
        ok = True
        for sub in range(3):
            report = differential_run(args.seed + sub, n_ops=2500, max_n=512,
                                      sampler_c=args.sampler_c)
            print(report.to_text(), file=out)
            ok = ok and report.passed
        return 0 if ok else 1

    if not args.input or not args.script:
        print("need --input and --script (or --verify / --bench)",
              file=sys.stderr)
        return 2
    try:
        with open(args.input) as fh:
            colors = [int(tok) for tok in fh.read().split()]
    except (OSError, ValueError) as exc:
        print(f"cannot read input array: {exc}", file=sys.stderr)
        return 2
    if not colors:
        print("input array must not be empty", file=sys.stderr)
        return 2
    try:
        with open(args.script) as fh:
            script = parse_script(fh.read())
    except OSError as exc:
        print(f"cannot read script: {exc}", file=sys.stderr)
        return 2
    except ScriptError as exc:
        print(f"script rejected: {exc}", file=sys.stderr)
        return 2
    arr = RangeFrequencyArray(colors, seed=args.seed, sampler_c=args.sampler_c)
    try:
        execute_script(arr, script, out)
    except ScriptError as exc:
        print(f"script failed: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
