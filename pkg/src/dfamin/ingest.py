"""LTS parsing, powerset determinization, completion and the DFA/partition file formats.

DFA file, version 1 (ASCII, LF, single spaces)::

    DFA 1 <n> <k> <initial>
    ACC <count> <sorted accepting ids...>
    0: <delta[0][0]> ... <delta[0][n-1]>
    ...
    <k-1>: ...
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass

import numpy as np

from .core import Dfa, DfaminError, Lts, Partition, canonicalize

FORMAT_VERSION = 1
DEFAULT_SUBSET_BUDGET = 1 << 22

_HEADER = re.compile(r"^\s*des\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")
_TRANSITION = re.compile(r'^\s*\(\s*(\d+)\s*,\s*("(?:[^"\\]|\\.)*"|[^,]*?)\s*,\s*(\d+)\s*\)\s*$')


class LtsParseError(DfaminError, ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class DfaFormatError(DfaminError, ValueError):
    pass


class StateBudgetExceeded(DfaminError):
    def __init__(self, budget: int):
        self.budget = budget
        super().__init__(f"determinization exceeded {budget} subset states")


def parse_lts(text: str) -> Lts:
    lines = text.splitlines()
    numbered = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip()]
    if not numbered:
        raise LtsParseError(1, "missing 'des' header")
    lineno, header = numbered[0]
    m = _HEADER.match(header)
    if not m:
        raise LtsParseError(lineno, f"malformed header {header.strip()!r}")
    initial, count, num_states = (int(g) for g in m.groups())
    body = numbered[1:]
    if len(body) != count:
        last = body[-1][0] if body else lineno
        raise LtsParseError(last, f"header announces {count} transitions, found {len(body)}")
    if num_states < 1:
        raise LtsParseError(lineno, "state count must be positive")
    if initial >= num_states:
        raise LtsParseError(lineno, f"initial state {initial} out of range")
    transitions = []
    for lineno, ln in body:
        m = _TRANSITION.match(ln)
        if not m:
            raise LtsParseError(lineno, f"malformed transition {ln.strip()!r}")
        src, label, dst = int(m.group(1)), m.group(2), int(m.group(3))
        if label.startswith('"'):
            label = label[1:-1]
        if src >= num_states or dst >= num_states:
            raise LtsParseError(lineno, f"state id out of range [0, {num_states})")
        transitions.append((src, label, dst))
    return Lts(num_states, initial, tuple(transitions))


@dataclass(frozen=True, eq=False)
class SubsetAutomaton:
    """Deterministic but possibly partial; ``table[a][s] == -1`` marks a missing edge.

    ``subsets[s]`` lists the LTS states making up subset state ``s``. Every
    subset state is accepting.
    """

    labels: tuple
    subsets: tuple
    table: np.ndarray
    initial: int = 0

    @property
    def num_states(self) -> int:
        return len(self.subsets)


def determinize(lts: Lts, max_states: int = DEFAULT_SUBSET_BUDGET) -> SubsetAutomaton:
    labels = lts.labels
    label_id = {lbl: i for i, lbl in enumerate(labels)}
    succ: list[list[set]] = [[set() for _ in labels] for _ in range(lts.num_states)]
    for src, lbl, dst in lts.transitions:
        succ[src][label_id[lbl]].add(dst)

    start = frozenset([lts.initial])
    index = {start: 0}
    order = [start]
    rows: list[list[int]] = []
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        row = []
        for a in range(len(labels)):
            target = set()
            for q in cur:
                target |= succ[q][a]
            if not target:
                row.append(-1)
                continue
            target = frozenset(target)
            sid = index.get(target)
            if sid is None:
                if len(order) >= max_states:
                    raise StateBudgetExceeded(max_states)
                sid = index[target] = len(order)
                order.append(target)
                queue.append(target)
            row.append(sid)
        rows.append(row)
    table = np.array(rows, dtype=np.intp).reshape(len(order), len(labels)).T.copy()
    return SubsetAutomaton(tuple(labels), tuple(tuple(sorted(s)) for s in order), table, 0)


def complete(partial: SubsetAutomaton) -> Dfa:
    """Send every missing edge to a fresh non-accepting sink (added only if needed)."""
    n = partial.num_states
    table = partial.table
    missing = table < 0
    if not missing.any():
        return Dfa(n, len(partial.labels), table, np.ones(n, dtype=bool), partial.initial)
    delta = np.concatenate([np.where(missing, n, table),
                            np.full((table.shape[0], 1), n, dtype=np.intp)], axis=1)
    accepting = np.ones(n + 1, dtype=bool)
    accepting[n] = False
    return Dfa(n + 1, len(partial.labels), delta, accepting, partial.initial)


def lts_to_dfa(lts: Lts, max_states: int = DEFAULT_SUBSET_BUDGET) -> Dfa:
    return complete(determinize(lts, max_states))


def write_dfa(dfa: Dfa) -> str:
    acc = dfa.accepting_states
    lines = [f"DFA {FORMAT_VERSION} {dfa.num_states} {dfa.alphabet_size} {dfa.initial}",
             " ".join(["ACC", str(len(acc)), *map(str, acc)])]
    for a in range(dfa.alphabet_size):
        lines.append(f"{a}: " + " ".join(map(str, dfa.delta[a].tolist())))
    return "\n".join(lines) + "\n"


def _ints(tokens, what: str) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise DfaFormatError(f"non-integer entry in {what}") from None


def read_dfa(text: str) -> Dfa:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or not lines[0].strip():
        raise DfaFormatError("missing header section")
    head = lines[0].split()
    if len(head) != 5 or head[0] != "DFA":
        raise DfaFormatError("malformed header section")
    if head[1] != str(FORMAT_VERSION):
        raise DfaFormatError(f"unsupported format version {head[1]}")
    n, k, initial = _ints(head[2:], "header")
    if n < 1 or k < 0:
        raise DfaFormatError("dimension mismatch: need n >= 1 and k >= 0")
    if not 0 <= initial < n:
        raise DfaFormatError("initial state out of range")
    if len(lines) < 2:
        raise DfaFormatError("missing ACC section")
    acc = lines[1].split()
    if not acc or acc[0] != "ACC":
        raise DfaFormatError("malformed ACC section")
    nums = _ints(acc[1:], "ACC section")
    if not nums or len(nums) - 1 != nums[0]:
        raise DfaFormatError("dimension mismatch in ACC section")
    ids = nums[1:]
    if any(not 0 <= q < n for q in ids):
        raise DfaFormatError("accepting state out of range")
    if len(lines) - 2 < k:
        raise DfaFormatError(f"missing transition section: expected {k} rows, found {len(lines) - 2}")
    if len(lines) - 2 > k:
        raise DfaFormatError(f"dimension mismatch: expected {k} transition rows, found {len(lines) - 2}")
    delta = np.empty((k, n), dtype=np.intp)
    for a in range(k):
        label, _, rest = lines[2 + a].partition(":")
        if label != str(a):
            raise DfaFormatError(f"transition row {a} is labelled {label!r}")
        row = _ints(rest.split(), f"transition row {a}")
        if len(row) != n:
            raise DfaFormatError(f"dimension mismatch in transition row {a}")
        if row and (min(row) < 0 or max(row) >= n):
            raise DfaFormatError(f"entry out of range in transition row {a}")
        delta[a] = row
    return Dfa(n, k, delta, np.array(ids, dtype=np.intp), initial)


def write_partition(p: Partition) -> str:
    return "".join(f"{q} {b}\n" for q, b in enumerate(p.block.tolist()))


def read_partition(text: str) -> Partition:
    labels = []
    for i, ln in enumerate(text.splitlines()):
        parts = ln.split()
        if len(parts) != 2:
            raise DfaFormatError(f"partition line {i + 1}: expected '<state> <block>'")
        q, b = _ints(parts, "partition")
        if q != i:
            raise DfaFormatError(f"partition line {i + 1}: states must be listed in ascending order")
        labels.append(b)
    return canonicalize(labels)
