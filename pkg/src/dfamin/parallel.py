"""Data-parallel primitives and the concurrent-write policy.

Bodies run on a thread pool in contiguous chunks. Within one :func:`par_for`
reads see the state as of loop entry: racing writes go through
:class:`SharedArray` and are committed after every body has run, resolved
by a :class:`RacePolicy`.
"""

from __future__ import annotations

import enum
import functools
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Sequence

import numpy as np

THREADS_ENV = "DFAMIN_THREADS"

# below this many indices chunking costs more than it saves
MIN_CHUNK = 1 << 14


class RacePolicy(enum.Enum):
    ARBITRARY = "arbitrary-winner"
    MIN = "deterministic-min"
    MAX = "deterministic-max"

    @classmethod
    def parse(cls, value) -> "RacePolicy":
        if isinstance(value, cls):
            return value
        for p in cls:
            if value in (p.value, p.name.lower()):
                return p
        raise ValueError(f"unknown race policy {value!r}")


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


_pools: dict[int, ThreadPoolExecutor] = {}
_pool_lock = threading.Lock()


def _pool(workers: int) -> ThreadPoolExecutor:
    with _pool_lock:
        pool = _pools.get(workers)
        if pool is None:
            pool = _pools[workers] = ThreadPoolExecutor(workers, thread_name_prefix="dfamin")
        return pool


def chunks(n: int, workers: int, min_chunk: int = MIN_CHUNK) -> list[tuple[int, int]]:
    if n <= 0:
        return []
    parts = max(1, min(workers, n // max(1, min_chunk)))
    bounds = np.linspace(0, n, parts + 1).astype(int)
    return [(int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]


def par_chunks(n: int, kernel: Callable[[int, int], None], workers: Optional[int] = None,
               min_chunk: int = MIN_CHUNK) -> None:
    """Run ``kernel(lo, hi)`` over disjoint chunks covering ``[0, n)``.

    Kernels must only write index ranges they own.
    """
    workers = worker_count() if workers is None else workers
    parts = chunks(n, workers, min_chunk)
    if len(parts) <= 1:
        for lo, hi in parts:
            kernel(lo, hi)
        return
    futures = [_pool(workers).submit(kernel, lo, hi) for lo, hi in parts]
    for f in futures:
        f.result()


def scatter(target: np.ndarray, index, values, policy: RacePolicy,
            rng: Optional[np.random.Generator] = None) -> None:
    """``target[index[j]] := values[j]`` for all j at once, with conflicts resolved by policy."""
    index = np.asarray(index, dtype=np.intp)
    values = np.asarray(values)
    if index.size == 0:
        return
    if policy is RacePolicy.MIN:
        order = np.lexsort((values, index))
    elif policy is RacePolicy.MAX:
        order = np.lexsort((-values.astype(np.int64), index))
    else:
        rng = np.random.default_rng() if rng is None else rng
        perm = rng.permutation(index.size)
        order = perm[np.argsort(index[perm], kind="stable")]
    idx = index[order]
    first = np.ones(idx.size, dtype=bool)
    first[1:] = idx[1:] != idx[:-1]
    target[idx[first]] = values[order][first]


class SharedArray:
    """Array written concurrently inside :func:`par_for`.

    ``write`` records the intent; the committed value of a cell is chosen
    by the loop's policy among all values written to it.
    """

    def __init__(self, data):
        self.data = np.array(data)
        self._pending: list[tuple[int, object]] = []
        self._lock = threading.Lock()

    def __getitem__(self, i):
        return self.data[i]

    def __len__(self):
        return len(self.data)

    def write(self, i: int, value) -> None:
        with self._lock:
            self._pending.append((i, value))

    def commit(self, policy: RacePolicy, rng: Optional[np.random.Generator] = None) -> None:
        if self._pending:
            idx, vals = zip(*self._pending)
            scatter(self.data, np.array(idx), np.array(vals, dtype=self.data.dtype), policy, rng)
        self._pending = []


def par_for(range_, body: Callable[[int], None], policy: RacePolicy = RacePolicy.ARBITRARY,
            shared: Sequence[SharedArray] = (), workers: Optional[int] = None,
            rng: Optional[np.random.Generator] = None) -> None:
    """Run ``body(i)`` once for every index; commit ``shared`` writes afterwards."""
    if isinstance(range_, int):
        range_ = range(range_)
    lo, hi = range_.start, range_.stop

    def kernel(a, b):
        for i in range(lo + a, lo + b):
            body(i)

    par_chunks(max(0, hi - lo), kernel, workers, min_chunk=64)
    for arr in shared:
        arr.commit(policy, rng)


def par_sort(items, compare: Callable[[object, object], bool]) -> list:
    """Sort by a strict-weak-order ``compare(x, y)`` meaning x < y. Not stable."""

    def cmp(x, y):
        if compare(x, y):
            return -1
        if compare(y, x):
            return 1
        return 0

    return sorted(items, key=functools.cmp_to_key(cmp))


def lex_order(keys: np.ndarray) -> np.ndarray:
    """Permutation sorting the columns of ``keys`` lexicographically, row 0 most significant."""
    keys = np.asarray(keys)
    if keys.ndim == 1:
        return np.argsort(keys, kind="stable")
    if keys.shape[0] == 1:
        return np.argsort(keys[0], kind="stable")
    return np.lexsort(keys[::-1])


def adjacent_diff(items, are_neq: Optional[Callable[[object, object], bool]] = None) -> np.ndarray:
    """0 at position 0, then 1 wherever an item differs from its predecessor.

    With no predicate, ``items`` is an array compared elementwise (1-D) or
    column by column (2-D, one key per column).
    """
    if are_neq is not None:
        out = np.zeros(len(items), dtype=np.intp)
        for i in range(1, len(items)):
            out[i] = 1 if are_neq(items[i], items[i - 1]) else 0
        return out
    arr = np.asarray(items)
    n = arr.shape[-1] if arr.ndim else 0
    out = np.zeros(n, dtype=np.intp)
    if n > 1:
        neq = arr[..., 1:] != arr[..., :-1]
        if neq.ndim == 2:
            neq = neq.any(axis=0)
        out[1:] = neq
    return out


def inclusive_scan(items) -> np.ndarray:
    return np.cumsum(np.asarray(items, dtype=np.intp), dtype=np.intp)
