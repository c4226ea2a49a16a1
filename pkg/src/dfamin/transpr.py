"""Partition refinement after a per-letter partial transitive closure.

Every letter ``a`` gets power letters ``a^(2^i)`` for ``i`` up to
``floor(log2 n)``, computed by pointer doubling; leader-election refinement
then runs on the enlarged alphabet.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import CapacityExceeded, Deadline, Dfa, MinimizationTimeout, Partition, RunStats
from .parallel import RacePolicy, par_chunks
from .partref import naive_pr


def doubling_levels(n: int) -> int:
    """``floor(log2 n)``: the number of doubling rounds."""
    return n.bit_length() - 1


def expansion_bytes(n: int, k: int) -> int:
    return (doubling_levels(n) + 1) * k * n * np.dtype(np.intp).itemsize


@dataclass(frozen=True, eq=False)
class ExpandedDfa:
    """A DFA plus its power letters; letter ``(a, i)`` sits at row ``i * k + a``."""

    base: Dfa
    levels: int
    delta_t: np.ndarray

    def letter(self, a: int, i: int) -> int:
        return i * self.base.alphabet_size + a

    def power(self, a: int, i: int) -> np.ndarray:
        return self.delta_t[self.letter(a, i)]

    @property
    def closure_steps(self) -> int:
        return self.levels

    def as_dfa(self) -> Dfa:
        b = self.base
        return Dfa(b.num_states, self.delta_t.shape[0], self.delta_t, b.accepting, b.initial)


def expand_alphabet(dfa: Dfa, max_memory_bytes: Optional[int] = None,
                    deadline: Optional[Deadline] = None, workers=None) -> ExpandedDfa:
    n, k = dfa.num_states, dfa.alphabet_size
    levels = doubling_levels(n)
    need = expansion_bytes(n, k)
    if max_memory_bytes is not None and need > max_memory_bytes:
        raise CapacityExceeded(need, max_memory_bytes, "alphabet expansion")
    delta_t = np.empty(((levels + 1) * k, n), dtype=np.intp)
    delta_t[:k] = dfa.delta
    for i in range(1, levels + 1):
        if deadline is not None:
            deadline.check()
        prev = delta_t[(i - 1) * k:i * k]
        cur = delta_t[i * k:(i + 1) * k]

        def kernel(lo, hi, prev=prev, cur=cur):
            for a in range(k):
                cur[a, lo:hi] = prev[a, prev[a, lo:hi]]

        par_chunks(n, kernel, workers)
    delta_t.setflags(write=False)
    return ExpandedDfa(dfa, levels, delta_t)


def trans_pr(dfa: Dfa, policy: RacePolicy = RacePolicy.ARBITRARY, timeout_ms: Optional[float] = None,
             max_memory_bytes: Optional[int] = None, rng: Optional[np.random.Generator] = None,
             trace: Optional[list] = None, workers=None) -> tuple[Partition, RunStats]:
    """``stats.iterations`` counts refinement passes only; closure rounds go to ``closure_steps``."""
    setup = RunStats()
    deadline = Deadline(timeout_ms, setup)
    expanded = expand_alphabet(dfa, max_memory_bytes, deadline, workers)
    remaining = None if timeout_ms is None else max(0.0, timeout_ms - deadline.elapsed_ms())
    try:
        partition, stats = naive_pr(expanded.as_dfa(), policy, remaining, rng, trace, workers)
    except MinimizationTimeout as exc:
        exc.stats.closure_steps = expanded.closure_steps
        exc.stats.elapsed = deadline.elapsed_ms()
        raise
    stats.closure_steps = expanded.closure_steps
    stats.elapsed = deadline.elapsed_ms()
    stats.peak_memory_estimate += expanded.delta_t.nbytes
    return partition, stats
