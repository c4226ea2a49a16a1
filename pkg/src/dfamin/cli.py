"""``dfamin`` command line: gen, ingest, minimize, check, bench.

Exit codes: 0 ok, 2 usage or unreadable input, 3 timeout, 4 capacity
exceeded, 5 algorithms disagree.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from .bench import (ALGOS, CSV_HEADER, DEFAULT_REPEAT, DEFAULT_TIMEOUT_MS, BenchRecord, load_dfa_file,
                    run_algo, run_suite, write_csv)
from .core import (STATUS_CAPACITY, STATUS_TIMEOUT, CapacityExceeded, DfaminError, Dfa,
                   MinimizationTimeout, Partition, language_equivalent, quotient)
from .generators import bit_splitter, chain_dfa, fib_dfa, random_dfa
from .ingest import (DEFAULT_SUBSET_BUDGET, StateBudgetExceeded, lts_to_dfa, parse_lts, write_dfa,
                     write_partition)
from .parallel import RacePolicy, worker_count
from .trans import max_states_for

EXIT_OK, EXIT_USAGE, EXIT_TIMEOUT, EXIT_CAPACITY, EXIT_DISAGREE = 0, 2, 3, 4, 5

# default trans limit in `check`: floor((8 * 2 MiB)^(1/4)) = 64 states
CHECK_MAX_MEM = 2 << 20


def _emit(text: str, out: Optional[str]) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _load(path: str) -> Dfa:
    try:
        return load_dfa_file(Path(path))
    except (OSError, ValueError, DfaminError) as exc:
        raise SystemExit(_fail(EXIT_USAGE, f"cannot read {path}: {exc}"))


def _fail(code: int, msg: str) -> int:
    print(f"dfamin: {msg}", file=sys.stderr)
    return code


def cmd_gen(args) -> int:
    fam, params = args.family, args.params
    expected = 2 if fam == "random" else 1
    if len(params) != expected:
        args.parser.error(f"gen {fam} takes {expected} integer parameter(s)")
    if fam == "fib":
        if params[0] < 2:
            args.parser.error("gen fib needs n >= 2")
        dfa = fib_dfa(params[0])
    elif fam == "bits":
        if params[0] < 1:
            args.parser.error("gen bits needs n >= 1")
        dfa = bit_splitter(params[0])
    elif fam == "chain":
        if params[0] < 2:
            args.parser.error("gen chain needs len >= 2")
        dfa = chain_dfa(params[0])
    else:
        n, k = params
        if n < 1 or k < 1 or not 0.0 <= args.accept_prob <= 1.0:
            args.parser.error("gen random needs n >= 1, k >= 1 and 0 <= accept-prob <= 1")
        dfa = random_dfa(n, k, args.seed, args.accept_prob)
    _emit(write_dfa(dfa), args.output)
    return EXIT_OK


def cmd_ingest(args) -> int:
    try:
        lts = parse_lts(Path(args.input).read_text())
    except (OSError, DfaminError) as exc:
        return _fail(EXIT_USAGE, f"cannot read {args.input}: {exc}")
    try:
        dfa = lts_to_dfa(lts, args.max_states)
    except StateBudgetExceeded as exc:
        return _fail(EXIT_CAPACITY, str(exc))
    _emit(write_dfa(dfa), args.output)
    if args.labels:
        Path(args.labels).write_text("".join(f"{i} {lbl}\n" for i, lbl in enumerate(lts.labels)))
    return EXIT_OK


def _append_stats(path: str, record: BenchRecord) -> None:
    p = Path(path)
    fresh = not p.exists() or p.stat().st_size == 0
    with p.open("a") as fh:
        if fresh:
            fh.write(CSV_HEADER + "\n")
        fh.write(record.to_csv() + "\n")


def cmd_minimize(args) -> int:
    dfa = _load(args.input)
    policy = RacePolicy.parse(args.policy)
    name = Path(args.input).stem
    n, k = dfa.num_states, dfa.alphabet_size
    try:
        partition, stats = run_algo(args.algo, dfa, policy, args.timeout_ms, args.max_mem_bytes)
    except MinimizationTimeout as exc:
        if args.stats:
            _append_stats(args.stats, BenchRecord(name, n, k, args.algo, None, None, None,
                                                  exc.stats.elapsed, STATUS_TIMEOUT))
        return _fail(EXIT_TIMEOUT, f"{args.algo} timed out after {args.timeout_ms} ms")
    except CapacityExceeded as exc:
        if args.stats:
            _append_stats(args.stats, BenchRecord(name, n, k, args.algo, None, None, None,
                                                  0.0, STATUS_CAPACITY))
        return _fail(EXIT_CAPACITY, f"capacity-exceeded: {exc}")
    if args.stats:
        _append_stats(args.stats, BenchRecord(name, n, k, args.algo, partition.num_blocks, stats.iterations,
                                              stats.closure_steps, stats.elapsed))
    _emit(write_partition(partition), args.output)
    return EXIT_OK


def find_disagreement(results: dict[str, Partition]) -> Optional[tuple[str, str, int, int]]:
    """First ``(algo_a, algo_b, p, q)`` where p, q are grouped by one and split by the other."""
    names = list(results)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            pa, pb = results[a].block, results[b].block
            if len(pa) != len(pb):
                return a, b, -1, -1
            for x, y in ((pa, pb), (pb, pa)):
                # first member of each x-block as representative
                reps = np.full(len(x), -1, dtype=np.intp)
                reps[x[::-1]] = np.arange(len(x))[::-1]
                rep = reps[x]
                bad = np.flatnonzero(y != y[rep])
                if bad.size:
                    q = int(bad[0])
                    return a, b, int(rep[q]), q
    return None


def cmd_check(args) -> int:
    dfa = _load(args.input)
    policy = RacePolicy.parse(args.policy)
    algos = ["oracle", "naive", "naive-cas", "sort", "transpr"]
    if dfa.num_states <= max_states_for(args.max_mem_bytes):
        algos.append("trans")
    results = {}
    for algo in algos:
        try:
            results[algo], stats = run_algo(algo, dfa, policy, args.timeout_ms, args.max_mem_bytes)
        except MinimizationTimeout:
            return _fail(EXIT_TIMEOUT, f"{algo} timed out")
        except CapacityExceeded as exc:
            return _fail(EXIT_CAPACITY, f"{algo}: {exc}")
        print(f"{algo}: {results[algo].num_blocks} blocks, {stats.iterations} iterations")
    return report_check(dfa, results)


def report_check(dfa: Dfa, results: dict[str, Partition]) -> int:
    diff = find_disagreement(results)
    if diff is not None:
        a, b, p, q = diff
        return _fail(EXIT_DISAGREE, f"{a} and {b} disagree: witness states {p} and {q}")
    try:
        ok = language_equivalent(dfa, quotient(dfa, results["oracle"]))
    except DfaminError as exc:
        return _fail(EXIT_DISAGREE, f"quotient failed: {exc}")
    if not ok:
        return _fail(EXIT_DISAGREE, "quotient is not language equivalent to the input")
    print(f"all {len(results)} algorithms agree")
    return EXIT_OK


def cmd_bench(args) -> int:
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    rng = np.random.default_rng(args.seed) if args.seed is not None else None
    try:
        records = run_suite(args.suite, algos, RacePolicy.parse(args.policy), args.timeout_ms,
                            args.max_mem_bytes, args.repeat, rng)
    except ValueError as exc:
        args.parser.error(str(exc))
    _emit(write_csv(records), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dfamin", description="Parallel DFA minimization toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a benchmark DFA")
    p.add_argument("family", choices=["fib", "bits", "chain", "random"])
    p.add_argument("params", type=int, nargs="+")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--accept-prob", type=float, default=0.5)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen, parser=p)

    p = sub.add_parser("ingest", help="determinize and complete an .aut LTS")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--max-states", type=int, default=DEFAULT_SUBSET_BUDGET)
    p.add_argument("--labels", help="write the letter index -> label map here")
    p.set_defaults(func=cmd_ingest, parser=p)

    p = sub.add_parser("minimize", help="minimize one DFA file")
    p.add_argument("input")
    p.add_argument("--algo", choices=ALGOS, required=True)
    p.add_argument("--timeout-ms", type=float, default=DEFAULT_TIMEOUT_MS)
    p.add_argument("--max-mem-bytes", type=int)
    p.add_argument("--policy", default=RacePolicy.ARBITRARY.value,
                   choices=[pol.value for pol in RacePolicy])
    p.add_argument("--stats", help="append a CSV record to this file")
    p.add_argument("-o", "--output", help="partition file (default stdout)")
    p.set_defaults(func=cmd_minimize, parser=p)

    p = sub.add_parser("check", help="cross-check every algorithm against the oracle")
    p.add_argument("input")
    p.add_argument("--timeout-ms", type=float, default=DEFAULT_TIMEOUT_MS)
    p.add_argument("--max-mem-bytes", type=int, default=CHECK_MAX_MEM)
    p.add_argument("--policy", default=RacePolicy.MIN.value, choices=[pol.value for pol in RacePolicy])
    p.set_defaults(func=cmd_check, parser=p)

    p = sub.add_parser("bench", help="run a benchmark suite and write CSV")
    p.add_argument("--suite", action="append", required=True,
                   help="fib:5..15, bits:3..12, chain:4,64,1024, random:200x3@42 or a directory")
    p.add_argument("--algos", default="naive,sort,transpr")
    p.add_argument("--timeout-ms", type=float, default=DEFAULT_TIMEOUT_MS)
    p.add_argument("--max-mem-bytes", type=int)
    p.add_argument("--repeat", type=int, default=DEFAULT_REPEAT)
    p.add_argument("--policy", default=RacePolicy.ARBITRARY.value,
                   choices=[pol.value for pol in RacePolicy])
    p.add_argument("--seed", type=int, help="seed for arbitrary-winner elections")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bench, parser=p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        try:
            worker_count()
        except ValueError as exc:
            parser.error(str(exc))
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
