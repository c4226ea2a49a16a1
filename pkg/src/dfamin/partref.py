"""Leader-election partition refinement, two-phase and fused compare-and-swap variants.

Blocks are named by a leader state (``block[q]`` is the leader of q's
block). In each iteration every state is compared with its leader on every
letter; states that differ are split off into one new block per old block,
whose leader is elected among them. Both phases read the block array as it
was at the start of the iteration.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .core import Deadline, Dfa, Partition, RunStats, canonicalize
from .parallel import RacePolicy, par_chunks, scatter

BOTTOM = -1


def initial_leaders(dfa: Dfa) -> np.ndarray:
    """Smallest accepting and smallest non-accepting state lead their classes."""
    acc = dfa.accepting
    if acc.all() or not acc.any():
        return np.zeros(dfa.num_states, dtype=np.intp)
    q_f = int(np.argmax(acc))
    q_n = int(np.argmax(~acc))
    return np.where(acc, q_f, q_n).astype(np.intp)


def split_candidates(delta: np.ndarray, block: np.ndarray, workers=None) -> tuple[np.ndarray, np.ndarray]:
    """(state, letter) pairs whose successor block differs from the leader's."""
    k, n = delta.shape
    differ = np.empty((k, n), dtype=bool)

    def kernel(lo, hi):
        own = block[delta[:, lo:hi]]
        lead = block[delta[:, block[lo:hi]]]
        np.not_equal(own, lead, out=differ[:, lo:hi])

    par_chunks(n, kernel, workers)
    letters, states = np.nonzero(differ)
    return states, letters


def _stats_memory(dfa: Dfa) -> int:
    n, k = dfa.num_states, dfa.alphabet_size
    # block, frozen copy, new_leader, plus the k x n difference mask
    return 3 * n * np.dtype(np.intp).itemsize + k * n


def naive_pr(dfa: Dfa, policy: RacePolicy = RacePolicy.ARBITRARY, timeout_ms: Optional[float] = None,
             rng: Optional[np.random.Generator] = None, trace: Optional[list] = None,
             workers: Optional[int] = None) -> tuple[Partition, RunStats]:
    """Two-phase leader-election refinement.

    Phase A writes each differing state into ``new_leader[block[q]]`` (racing
    writes settled by ``policy``); phase B moves every differing state to the
    elected leader. ``trace``, if given, receives a copy of the leader array
    after every iteration.
    """
    policy = RacePolicy.parse(policy)
    stats = RunStats(peak_memory_estimate=_stats_memory(dfa))
    deadline = Deadline(timeout_ms, stats)
    n = dfa.num_states
    delta = dfa.delta
    block = initial_leaders(dfa)
    new_leader = np.full(n, BOTTOM, dtype=np.intp)
    while True:
        deadline.check()
        stats.iterations += 1
        frozen = block.copy()
        states, _ = split_candidates(delta, frozen, workers)
        if states.size == 0:
            break
        leaders = frozen[states]
        scatter(new_leader, leaders, states, policy, rng)
        block[states] = new_leader[leaders]
        new_leader[leaders] = BOTTOM
        if trace is not None:
            trace.append(block.copy())
    return canonicalize(block), deadline.finish()


def naive_pr_cas(dfa: Dfa, timeout_ms: Optional[float] = None,
                 rng: Optional[np.random.Generator] = None, trace: Optional[list] = None,
                 workers: Optional[int] = None) -> tuple[Partition, RunStats]:
    """Fused single-loop variant with compare-and-swap leader election.

    Threads are serialized in ascending (state, letter) order, or in a
    random order drawn from ``rng``. The first thread to find
    ``new_leader[leader]`` empty installs itself and becomes the new leader;
    later threads of the same block read the winner. ``new_leader`` is reset
    after the loop.
    """
    stats = RunStats(peak_memory_estimate=_stats_memory(dfa))
    deadline = Deadline(timeout_ms, stats)
    n = dfa.num_states
    delta = dfa.delta
    block = initial_leaders(dfa)
    new_leader = np.full(n, BOTTOM, dtype=np.intp)
    while True:
        deadline.check()
        stats.iterations += 1
        frozen = block.copy()
        states, letters = split_candidates(delta, frozen, workers)
        if states.size == 0:
            break
        order = np.lexsort((letters, states))
        if rng is not None:
            order = rng.permutation(order)
        states = states[order]
        leaders = frozen[states]
        # CAS: the first thread in execution order per leader finds BOTTOM
        _, first = np.unique(leaders, return_index=True)
        winners = leaders[first]
        new_leader[winners] = states[first]
        block[states] = new_leader[leaders]
        new_leader[winners] = BOTTOM
        if trace is not None:
            trace.append(block.copy())
    return canonicalize(block), deadline.finish()
