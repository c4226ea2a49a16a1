"""Automaton and partition types, plus the sequential reference machinery.

Everything here is single-threaded and pure. The parallel minimizers in the
sibling modules are all checked against :func:`moore_oracle`.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

STATUS_OK = "ok"
STATUS_TIMEOUT = "timeout"
STATUS_CAPACITY = "capacity-exceeded"


class DfaminError(Exception):
    """Base class for errors raised by this package."""


class InvalidDfaError(DfaminError, ValueError):
    pass


class InconsistentPartitionError(DfaminError, ValueError):
    pass


class AlphabetMismatchError(DfaminError, ValueError):
    pass


class PartitionLengthError(DfaminError, ValueError):
    pass


class CapacityExceeded(DfaminError):
    """Raised before allocation when a run would need more memory than allowed."""

    def __init__(self, required_bytes: int, limit_bytes: int, what: str = ""):
        self.required_bytes = required_bytes
        self.limit_bytes = limit_bytes
        msg = f"needs {required_bytes} bytes, limit is {limit_bytes} bytes"
        if what:
            msg = f"{what}: {msg}"
        super().__init__(msg)


class MinimizationTimeout(DfaminError):
    def __init__(self, stats: "RunStats"):
        self.stats = stats
        super().__init__(f"timed out after {stats.elapsed:.1f} ms ({stats.iterations} iterations)")


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Dfa:
    """A complete DFA over letters ``0..alphabet_size-1``.

    ``delta[a][q]`` is the target of ``q`` on letter ``a``; ``accepting`` is a
    boolean mask over states. Arrays are made read-only on construction.
    """

    num_states: int
    alphabet_size: int
    delta: np.ndarray
    accepting: np.ndarray
    initial: int = 0

    def __post_init__(self):
        n, k = self.num_states, self.alphabet_size
        if n < 1:
            raise InvalidDfaError("a DFA needs at least one state")
        if k < 0:
            raise InvalidDfaError("alphabet size must be non-negative")
        delta = np.array(self.delta, dtype=np.intp).reshape(k, n)
        if delta.size and (delta.min() < 0 or delta.max() >= n):
            raise InvalidDfaError("transition target out of range")
        acc = np.asarray(self.accepting)
        if acc.dtype != bool:
            mask = np.zeros(n, dtype=bool)
            ids = acc.astype(np.intp).ravel()
            if ids.size and (ids.min() < 0 or ids.max() >= n):
                raise InvalidDfaError("accepting state out of range")
            mask[ids] = True
            acc = mask
        elif acc.shape != (n,):
            raise InvalidDfaError("accepting mask has wrong length")
        else:
            acc = acc.copy()
        if not 0 <= self.initial < n:
            raise InvalidDfaError("initial state out of range")
        object.__setattr__(self, "delta", _frozen(delta))
        object.__setattr__(self, "accepting", _frozen(acc))
        object.__setattr__(self, "initial", int(self.initial))

    @classmethod
    def build(cls, delta: Sequence[Sequence[int]], accepting: Iterable[int],
              initial: int = 0, num_states: Optional[int] = None) -> "Dfa":
        rows = [list(r) for r in delta]
        if num_states is None:
            if not rows:
                raise InvalidDfaError("num_states is required for an empty alphabet")
            num_states = len(rows[0])
        return cls(num_states, len(rows), np.array(rows, dtype=np.intp).reshape(len(rows), num_states),
                   np.array(sorted(set(accepting)), dtype=np.intp), initial)

    @property
    def accepting_states(self) -> list[int]:
        return np.flatnonzero(self.accepting).tolist()

    def step(self, q: int, a: int) -> int:
        return int(self.delta[a, q])

    def accepts(self, word: Iterable[int]) -> bool:
        q = self.initial
        for a in word:
            q = int(self.delta[a, q])
        return bool(self.accepting[q])

    def __eq__(self, other):
        if not isinstance(other, Dfa):
            return NotImplemented
        return (self.num_states == other.num_states
                and self.alphabet_size == other.alphabet_size
                and self.initial == other.initial
                and np.array_equal(self.delta, other.delta)
                and np.array_equal(self.accepting, other.accepting))

    __hash__ = None

    def __repr__(self):
        return (f"Dfa(num_states={self.num_states}, alphabet_size={self.alphabet_size}, "
                f"initial={self.initial}, accepting={len(self.accepting_states)} states)")


@dataclass(frozen=True)
class Lts:
    """Labelled transition system; may be nondeterministic and incomplete."""

    num_states: int
    initial: int
    transitions: tuple  # of (src, label, dst)

    def __post_init__(self):
        object.__setattr__(self, "transitions", tuple(tuple(t) for t in self.transitions))
        if self.num_states < 1:
            raise DfaminError("an LTS needs at least one state")
        if not 0 <= self.initial < self.num_states:
            raise DfaminError(f"initial state {self.initial} out of range")
        for src, _, dst in self.transitions:
            if not (0 <= src < self.num_states and 0 <= dst < self.num_states):
                raise DfaminError(f"transition ({src}, {dst}) out of range")

    @property
    def labels(self) -> list[str]:
        """Labels in order of first appearance."""
        return list(dict.fromkeys(lbl for _, lbl, _ in self.transitions))


@dataclass(frozen=True, eq=False)
class Partition:
    """Canonical block assignment: labels ``0..num_blocks-1`` by first occurrence."""

    block: np.ndarray
    num_blocks: int

    def __post_init__(self):
        object.__setattr__(self, "block", _frozen(np.asarray(self.block, dtype=np.intp)))

    def __len__(self):
        return len(self.block)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.num_blocks == other.num_blocks and np.array_equal(self.block, other.block)

    __hash__ = None

    def tolist(self) -> list[int]:
        return self.block.tolist()


@dataclass
class RunStats:
    iterations: int = 0
    closure_steps: int = 0
    elapsed: float = 0.0  # milliseconds
    peak_memory_estimate: int = 0  # bytes
    status: str = STATUS_OK


class Deadline:
    """Wall-clock budget; ``check`` raises once ``timeout_ms`` has passed."""

    def __init__(self, timeout_ms: Optional[float], stats: RunStats):
        self.start = time.perf_counter()
        self.timeout_ms = timeout_ms
        self.stats = stats

    def elapsed_ms(self) -> float:
        return (time.perf_counter() - self.start) * 1000.0

    def check(self) -> None:
        if self.timeout_ms is not None and self.elapsed_ms() > self.timeout_ms:
            self.stats.elapsed = self.elapsed_ms()
            self.stats.status = STATUS_TIMEOUT
            raise MinimizationTimeout(self.stats)

    def finish(self) -> RunStats:
        self.stats.elapsed = self.elapsed_ms()
        self.stats.status = STATUS_OK
        return self.stats


def canonicalize(raw_block) -> Partition:
    """Relabel blocks by order of first occurrence.

    >>> canonicalize([5, 5, 2, 5, 2]).tolist()
    [0, 0, 1, 0, 1]
    """
    raw = np.asarray(raw_block)
    if raw.size == 0:
        return Partition(np.zeros(0, dtype=np.intp), 0)
    _, first, inverse = np.unique(raw, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.intp)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return Partition(rank[inverse.ravel()], len(first))


def partitions_equal(p: Partition, q: Partition) -> bool:
    if len(p) != len(q):
        raise PartitionLengthError(f"partitions over {len(p)} and {len(q)} states")
    return np.array_equal(canonicalize(p.block).block, canonicalize(q.block).block)


def initial_labels(dfa: Dfa) -> np.ndarray:
    """0 for accepting, 1 otherwise; all 0 when one class is empty."""
    acc = dfa.accepting
    if acc.all() or not acc.any():
        return np.zeros(dfa.num_states, dtype=np.intp)
    return np.where(acc, 0, 1).astype(np.intp)


def remove_unreachable(dfa: Dfa) -> Dfa:
    n = dfa.num_states
    seen = np.zeros(n, dtype=bool)
    seen[dfa.initial] = True
    queue = deque([dfa.initial])
    columns = dfa.delta.T.tolist()
    while queue:
        q = queue.popleft()
        for t in columns[q]:
            if not seen[t]:
                seen[t] = True
                queue.append(t)
    keep = np.flatnonzero(seen)
    if len(keep) == n:
        return dfa
    renum = np.full(n, -1, dtype=np.intp)
    renum[keep] = np.arange(len(keep))
    return Dfa(len(keep), dfa.alphabet_size, renum[dfa.delta[:, keep]],
               dfa.accepting[keep], int(renum[dfa.initial]))


def moore_oracle(dfa: Dfa) -> Partition:
    """Sequential Moore refinement, grouping states by hashed signatures."""
    labels = initial_labels(dfa).tolist()
    columns = dfa.delta.T.tolist()
    count = len(set(labels))
    while True:
        seen: dict = {}
        new = []
        for q, col in enumerate(columns):
            sig = (labels[q], *[labels[t] for t in col])
            new.append(seen.setdefault(sig, len(seen)))
        labels = new
        if len(seen) == count:
            break
        count = len(seen)
    return canonicalize(labels)


def quotient(dfa: Dfa, p: Partition) -> Dfa:
    """Collapse each block of a transition-consistent partition to one state."""
    if len(p) != dfa.num_states:
        raise PartitionLengthError("partition does not match the DFA's state count")
    block = p.block
    reps = np.full(p.num_blocks, -1, dtype=np.intp)
    # first member of every block is its representative
    reps[block[::-1]] = np.arange(dfa.num_states)[::-1]
    rep_of = reps[block]
    if not np.array_equal(dfa.accepting, dfa.accepting[rep_of]):
        raise InconsistentPartitionError("a block mixes accepting and non-accepting states")
    succ = block[dfa.delta]
    bad = succ != succ[:, rep_of]
    if bad.any():
        a, q = (int(x[0]) for x in np.nonzero(bad))
        raise InconsistentPartitionError(
            f"states {int(rep_of[q])} and {q} share block {int(block[q])} "
            f"but disagree on letter {a}")
    return Dfa(p.num_blocks, dfa.alphabet_size, succ[:, reps], dfa.accepting[reps],
               int(block[dfa.initial]))


def language_equivalent(a: Dfa, b: Dfa) -> bool:
    """Breadth-first search of the product automaton for an acceptance mismatch."""
    if a.alphabet_size != b.alphabet_size:
        raise AlphabetMismatchError(f"alphabet sizes {a.alphabet_size} and {b.alphabet_size}")
    acc_a, acc_b = a.accepting.tolist(), b.accepting.tolist()
    da, db = a.delta.T.tolist(), b.delta.T.tolist()
    start = (a.initial, b.initial)
    seen = {start}
    queue = deque([start])
    while queue:
        p, q = queue.popleft()
        if acc_a[p] != acc_b[q]:
            return False
        for pair in zip(da[p], db[q]):
            if pair not in seen:
                seen.add(pair)
                queue.append(pair)
    return True
