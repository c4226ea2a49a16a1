"""Benchmark records, suite expansion and the algorithm registry."""

from __future__ import annotations

import re
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Iterator, Optional

import numpy as np

from .core import (STATUS_CAPACITY, STATUS_OK, STATUS_TIMEOUT, CapacityExceeded, Deadline, Dfa,
                   MinimizationTimeout, Partition, RunStats, moore_oracle)
from .generators import bit_splitter, chain_dfa, fib_dfa, random_dfa
from .ingest import lts_to_dfa, parse_lts, read_dfa
from .parallel import RacePolicy
from .partref import naive_pr, naive_pr_cas
from .sortpr import sort_pr
from .trans import trans_minimize
from .transpr import trans_pr

CSV_HEADER = "benchmark,n,k,algo,output_blocks,iterations,closure_steps,time_ms,status"
ALGOS = ("trans", "naive", "naive-cas", "sort", "transpr", "oracle")
DEFAULT_TIMEOUT_MS = 300_000
DEFAULT_REPEAT = 5

_NAME_OK = re.compile(r"[^A-Za-z0-9_.:-]")


def _oracle(dfa, timeout_ms=None, **_):
    stats = RunStats()
    deadline = Deadline(timeout_ms, stats)
    p = moore_oracle(dfa)
    stats.iterations = 1
    return p, deadline.finish()


def run_algo(algo: str, dfa: Dfa, policy: RacePolicy = RacePolicy.ARBITRARY,
             timeout_ms: Optional[float] = None, max_memory_bytes: Optional[int] = None,
             rng: Optional[np.random.Generator] = None) -> tuple[Partition, RunStats]:
    """Dispatch by CLI name. Raises MinimizationTimeout / CapacityExceeded."""
    if algo == "trans":
        return trans_minimize(dfa, max_memory_bytes, timeout_ms)
    if algo == "naive":
        return naive_pr(dfa, policy, timeout_ms, rng)
    if algo == "naive-cas":
        return naive_pr_cas(dfa, timeout_ms, rng if policy is RacePolicy.ARBITRARY else None)
    if algo == "sort":
        return sort_pr(dfa, timeout_ms)
    if algo == "transpr":
        return trans_pr(dfa, policy, timeout_ms, max_memory_bytes, rng)
    if algo == "oracle":
        return _oracle(dfa, timeout_ms)
    raise ValueError(f"unknown algorithm {algo!r}")


@dataclass
class BenchRecord:
    benchmark: str
    n: int
    k: int
    algo: str
    output_blocks: Optional[int]
    iterations: Optional[int]
    closure_steps: Optional[int]
    time_ms: float
    status: str = STATUS_OK

    def __post_init__(self):
        self.benchmark = _NAME_OK.sub("_", self.benchmark)
        if self.status != STATUS_OK:
            self.output_blocks = self.iterations = self.closure_steps = None

    def to_csv(self) -> str:
        def cell(v):
            return "" if v is None else str(v)

        return ",".join([self.benchmark, str(self.n), str(self.k), self.algo, cell(self.output_blocks),
                         cell(self.iterations), cell(self.closure_steps), f"{self.time_ms:.3f}",
                         self.status])

    @classmethod
    def from_csv(cls, line: str) -> "BenchRecord":
        f = line.rstrip("\n").split(",")
        if len(f) != 9:
            raise ValueError(f"expected 9 CSV fields, got {len(f)}")

        def opt(v):
            return None if v == "" else int(v)

        return cls(f[0], int(f[1]), int(f[2]), f[3], opt(f[4]), opt(f[5]), opt(f[6]), float(f[7]), f[8])


def write_csv(records: Iterable[BenchRecord]) -> str:
    return "".join([CSV_HEADER + "\n"] + [r.to_csv() + "\n" for r in records])


def read_csv(text: str) -> list[BenchRecord]:
    lines = text.splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("CSV header mismatch")
    return [BenchRecord.from_csv(ln) for ln in lines[1:] if ln]


def measure(name: str, dfa: Dfa, algo: str, policy: RacePolicy = RacePolicy.ARBITRARY,
            timeout_ms: Optional[float] = DEFAULT_TIMEOUT_MS, max_memory_bytes: Optional[int] = None,
            repeat: int = DEFAULT_REPEAT, rng: Optional[np.random.Generator] = None) -> BenchRecord:
    """Mean wall time over ``repeat`` runs; counts come from the first run."""
    times = []
    first = None
    for _ in range(max(1, repeat)):
        try:
            p, stats = run_algo(algo, dfa, policy, timeout_ms, max_memory_bytes, rng)
        except MinimizationTimeout as exc:
            return BenchRecord(name, dfa.num_states, dfa.alphabet_size, algo, None, None, None,
                               exc.stats.elapsed, STATUS_TIMEOUT)
        except CapacityExceeded:
            return BenchRecord(name, dfa.num_states, dfa.alphabet_size, algo, None, None, None,
                               0.0, STATUS_CAPACITY)
        times.append(stats.elapsed)
        if first is None:
            first = (p, stats)
    p, stats = first
    return BenchRecord(name, dfa.num_states, dfa.alphabet_size, algo, p.num_blocks, stats.iterations,
                       stats.closure_steps, statistics.fmean(times), STATUS_OK)


def _int_list(spec: str) -> list[int]:
    out = []
    for part in spec.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def load_dfa_file(path: Path, max_states: Optional[int] = None) -> Dfa:
    text = Path(path).read_text()
    if Path(path).suffix == ".aut":
        lts = parse_lts(text)
        return lts_to_dfa(lts) if max_states is None else lts_to_dfa(lts, max_states)
    return read_dfa(text)


def expand_suite(spec: str) -> Iterator[tuple[str, Callable[[], Dfa]]]:
    """Yield ``(name, thunk)`` pairs for a suite string.

    Forms: ``fib:5..15``, ``bits:3..12``, ``chain:4,64,1024``,
    ``random:200x3@42`` (n x k @ seed, comma separated), or a directory of
    ``.dfa`` / ``.aut`` files.
    """
    family, sep, params = spec.partition(":")
    if not sep:
        path = Path(spec)
        if not path.is_dir():
            raise ValueError(f"suite {spec!r} is neither family:params nor a directory")
        for f in sorted(path.iterdir()):
            if f.suffix in (".dfa", ".aut"):
                yield f.stem, (lambda f=f: load_dfa_file(f))
        return
    try:
        if family == "fib":
            for i in _int_list(params):
                if i < 2:
                    raise ValueError("fib index must be >= 2")
                yield f"fib_{i}", (lambda i=i: fib_dfa(i))
        elif family == "bits":
            for i in _int_list(params):
                if i < 1:
                    raise ValueError("bits index must be >= 1")
                yield f"bits_{i}", (lambda i=i: bit_splitter(i))
        elif family == "chain":
            for i in _int_list(params):
                if i < 2:
                    raise ValueError("chain length must be >= 2")
                yield f"chain_{i}", (lambda i=i: chain_dfa(i))
        elif family == "random":
            for item in params.split(","):
                m = re.fullmatch(r"\s*(\d+)x(\d+)(?:@(\d+))?\s*", item)
                if not m:
                    raise ValueError(f"random item {item!r} is not NxK[@SEED]")
                n, k, seed = int(m.group(1)), int(m.group(2)), int(m.group(3) or 0)
                yield f"random_{n}x{k}_s{seed}", (lambda n=n, k=k, seed=seed: random_dfa(n, k, seed))
        else:
            raise ValueError(f"unknown family {family!r}")
    except ValueError as exc:
        raise ValueError(f"bad suite {spec!r}: {exc}") from None


def run_suite(suites: Iterable[str], algos: Iterable[str], policy: RacePolicy = RacePolicy.ARBITRARY,
              timeout_ms: Optional[float] = DEFAULT_TIMEOUT_MS, max_memory_bytes: Optional[int] = None,
              repeat: int = DEFAULT_REPEAT, rng: Optional[np.random.Generator] = None) -> list[BenchRecord]:
    algos = list(algos)
    for a in algos:
        if a not in ALGOS:
            raise ValueError(f"unknown algorithm {a!r}")
    benchmarks = [b for s in suites for b in expand_suite(s)]
    if not benchmarks or not algos:
        raise ValueError("empty suite")
    records = []
    for name, make in benchmarks:
        dfa = make()
        for algo in algos:
            records.append(measure(name, dfa, algo, policy, timeout_ms, max_memory_bytes, repeat, rng))
    return records
