"""Apartness by transitive closure over the pair graph.

Nodes are state pairs ``(q, q')`` (index ``q * n + q'``) with an edge to
``(delta(q, a), delta(q', a))`` for every letter. Each iteration squares the
reachability relation once (``R := R or R.R``) and then marks every pair that
reaches an apart pair. The loop stops after a pass that marks nothing new.

``Reach`` is an ``n^2 x n^2`` packed bitset, so memory grows as ``n^4 / 8``
bytes; the guard refuses to start when that exceeds the limit.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .core import CapacityExceeded, Deadline, Dfa, Partition, RunStats, canonicalize
from .parallel import par_chunks

# float32 scratch for one blocked matmul pass
WORK_BYTES = 256 << 20


def reach_bytes(n: int) -> int:
    """Closed-form size of the Reach bitset: ``n^4`` bits."""
    return -(-n ** 4 // 8)


def max_states_for(max_memory_bytes: int) -> int:
    """Largest ``n`` with ``n^4`` bits within the limit, i.e. ``floor((8 M)^(1/4))``."""
    return math.isqrt(math.isqrt(8 * max_memory_bytes))


def check_capacity(n: int, max_memory_bytes: Optional[int]) -> None:
    if max_memory_bytes is not None and n > max_states_for(max_memory_bytes):
        raise CapacityExceeded(reach_bytes(n), max_memory_bytes, f"Reach bitset for n={n}")


def _block_sizes(m: int) -> tuple[int, int]:
    half = WORK_BYTES // 2
    cols = max(8, min(-(-m // 8) * 8, (half // (4 * m)) // 8 * 8))
    rows = max(1, min(m, half // (4 * (m + cols))))
    return rows, cols


def initial_reach(dfa: Dfa) -> np.ndarray:
    n = dfa.num_states
    m = n * n
    reach = np.zeros((m, -(-m // 8)), dtype=np.uint8)
    q = np.repeat(np.arange(n), n)
    q2 = np.tile(np.arange(n), n)
    src = np.arange(m)
    for a in range(dfa.alphabet_size):
        t = dfa.delta[a, q] * n + dfa.delta[a, q2]
        np.bitwise_or.at(reach, (src, t >> 3), (0x80 >> (t & 7)).astype(np.uint8))
    return reach


def initial_apart(dfa: Dfa) -> np.ndarray:
    acc = dfa.accepting
    return (acc[:, None] != acc[None, :]).ravel()


def _rows(reach: np.ndarray, lo: int, hi: int, m: int) -> np.ndarray:
    return np.unpackbits(reach[lo:hi], axis=1, count=m)


def close_once(reach: np.ndarray, m: int, deadline: Optional[Deadline] = None, workers=None) -> np.ndarray:
    """``R or R.R`` on the packed matrix, reading only the old ``R``."""
    out = reach.copy()
    rows, cols = _block_sizes(m)
    nbytes = reach.shape[1]
    step = cols // 8
    for b0 in range(0, nbytes, step):
        b1 = min(nbytes, b0 + step)
        right = np.unpackbits(reach[:, b0:b1], axis=1).astype(np.float32)

        def kernel(lo, hi, b0=b0, b1=b1, right=right):
            for r0 in range(lo, hi, rows):
                if deadline is not None:
                    deadline.check()
                r1 = min(hi, r0 + rows)
                left = _rows(reach, r0, r1, m).astype(np.float32)
                hit = (left @ right) > 0
                out[r0:r1, b0:b1] |= np.packbits(hit, axis=1)

        par_chunks(m, kernel, workers, min_chunk=rows)
    return out


def propagate(reach: np.ndarray, apart: np.ndarray, m: int, workers=None) -> np.ndarray:
    """Mark every pair node that reaches an apart node (frozen read of ``apart``)."""
    rows, _ = _block_sizes(m)
    target = apart.astype(np.float32)
    hits = np.zeros(m, dtype=bool)

    def kernel(lo, hi):
        for r0 in range(lo, hi, rows):
            r1 = min(hi, r0 + rows)
            hits[r0:r1] = (_rows(reach, r0, r1, m).astype(np.float32) @ target) > 0

    par_chunks(m, kernel, workers, min_chunk=rows)
    return apart | hits


def transitive_apartness(dfa: Dfa, max_memory_bytes: Optional[int] = None,
                         timeout_ms: Optional[float] = None, trace: Optional[list] = None,
                         workers=None) -> tuple[np.ndarray, RunStats]:
    """Return the final ``n x n`` Apart matrix and run statistics.

    ``trace`` receives ``(reach, apart)`` copies after every iteration;
    only sensible for tiny inputs.
    """
    n = dfa.num_states
    check_capacity(n, max_memory_bytes)
    m = n * n
    rows, cols = _block_sizes(m)
    stats = RunStats(peak_memory_estimate=2 * reach_bytes(n) + 2 * m + 4 * (rows * m + m * cols + rows * cols))
    deadline = Deadline(timeout_ms, stats)
    reach = initial_reach(dfa)
    apart = initial_apart(dfa)
    while True:
        deadline.check()
        stats.iterations += 1
        reach = close_once(reach, m, deadline, workers)
        new_apart = propagate(reach, apart, m, workers)
        changed = bool((new_apart & ~apart).any())
        apart = new_apart
        if trace is not None:
            trace.append((reach.copy(), apart.copy()))
        if not changed:
            break
    return apart.reshape(n, n), deadline.finish()


def apart_to_partition(apart: np.ndarray) -> Partition:
    """Group ``q`` with the smallest ``q'`` not apart from it."""
    return canonicalize(np.argmax(~apart, axis=1))


def trans_minimize(dfa: Dfa, max_memory_bytes: Optional[int] = None, timeout_ms: Optional[float] = None,
                   trace: Optional[list] = None, workers=None) -> tuple[Partition, RunStats]:
    apart, stats = transitive_apartness(dfa, max_memory_bytes, timeout_ms, trace, workers)
    return apart_to_partition(apart), stats
