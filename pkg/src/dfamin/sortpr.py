"""Signature-sorting partition refinement.

Each iteration sorts the states by (block, successor blocks per letter),
marks key changes with an adjacent difference and numbers the runs with an
inclusive scan. A block may split into any number of sub-blocks at once.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .core import Deadline, Dfa, Partition, RunStats, canonicalize, initial_labels
from .parallel import adjacent_diff, inclusive_scan, lex_order, par_chunks


def make_signature(dfa: Dfa, block: np.ndarray, workers=None) -> np.ndarray:
    """``(n, k)`` table with ``signature[q][a] = block[delta(q, a)]``."""
    n, k = dfa.num_states, dfa.alphabet_size
    sig = np.empty((n, k), dtype=np.intp)

    def kernel(lo, hi):
        sig[lo:hi] = block[dfa.delta[:, lo:hi]].T

    par_chunks(n, kernel, workers)
    return sig


def compare(block, signature, q1, q2) -> bool:
    """Strict order on states: block first, then signature letter by letter."""
    if block[q1] != block[q2]:
        return block[q1] < block[q2]
    for a in range(signature.shape[1]):
        if signature[q1][a] != signature[q2][a]:
            return signature[q1][a] < signature[q2][a]
    return False


def are_neq(block, signature, q1, q2) -> bool:
    if block[q1] != block[q2]:
        return True
    return any(signature[q1][a] != signature[q2][a] for a in range(signature.shape[1]))


def sort_pr(dfa: Dfa, timeout_ms: Optional[float] = None, trace: Optional[list] = None,
            workers: Optional[int] = None) -> tuple[Partition, RunStats]:
    n, k = dfa.num_states, dfa.alphabet_size
    isz = np.dtype(np.intp).itemsize
    stats = RunStats(peak_memory_estimate=(n * (k + 1) * 2 + 3 * n) * isz)
    deadline = Deadline(timeout_ms, stats)
    block = initial_labels(dfa)
    num_blocks = int(block.max()) + 1
    while True:
        deadline.check()
        stats.iterations += 1
        sig = make_signature(dfa, block, workers)
        keys = np.vstack([block[None, :], sig.T])
        state = lex_order(keys)
        new_block = inclusive_scan(adjacent_diff(keys[:, state]))
        block = np.empty(n, dtype=np.intp)
        block[state] = new_block
        if trace is not None:
            trace.append(block.copy())
        count = int(new_block[-1]) + 1
        if count == num_blocks:
            break
        num_blocks = count
    return canonicalize(block), deadline.finish()
