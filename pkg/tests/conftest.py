import itertools
from collections import deque

import numpy as np
import pytest
from hypothesis import strategies as st

from dfamin.core import Dfa, Lts

ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record a one-line PASS/FAIL verdict for the acceptance summary."""

    def record(name, ok, detail=""):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip())
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


# --- independent oracles -------------------------------------------------

def bfs_reachable(dfa):
    """Plain-Python BFS over the transition lists."""
    seen = {dfa.initial}
    queue = deque([dfa.initial])
    while queue:
        q = queue.popleft()
        for a in range(dfa.alphabet_size):
            t = int(dfa.delta[a][q])
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return seen


def run_word(dfa, word, start=None):
    q = dfa.initial if start is None else start
    for a in word:
        q = int(dfa.delta[a][q])
    return bool(dfa.accepting[q])


def brute_equivalence(dfa, max_len=None):
    """Group states by acceptance of every word up to ``max_len`` (default n)."""
    n, k = dfa.num_states, dfa.alphabet_size
    max_len = n if max_len is None else max_len
    words = [w for length in range(max_len + 1) for w in itertools.product(range(k), repeat=length)]
    return [tuple(run_word(dfa, w, q) for w in words) for q in range(n)]


def nfa_accepts(lts, labels, word):
    """Direct nondeterministic simulation: does ``word`` label a path from the initial state?"""
    cur = {lts.initial}
    for a in word:
        lbl = labels[a]
        cur = {dst for src, l, dst in lts.transitions if src in cur and l == lbl}
        if not cur:
            return False
    return True


def random_lts(rng, max_states=50, max_labels=4, max_transitions=200):
    n = int(rng.integers(1, max_states + 1))
    k = int(rng.integers(1, max_labels + 1))
    m = int(rng.integers(0, max_transitions + 1))
    names = [f"l{i}" for i in range(k)]
    trans = [(int(rng.integers(n)), names[int(rng.integers(k))], int(rng.integers(n))) for _ in range(m)]
    return Lts(n, int(rng.integers(n)), tuple(trans))


def same_grouping(labels_a, labels_b):
    """True iff two labelings induce the same equivalence (brute force over pairs)."""
    n = len(labels_a)
    return all((labels_a[p] == labels_a[q]) == (labels_b[p] == labels_b[q])
               for p in range(n) for q in range(n))


@st.composite
def dfas(draw, max_states=10, max_letters=3, min_letters=1):
    n = draw(st.integers(1, max_states))
    k = draw(st.integers(min_letters, max_letters))
    delta = draw(st.lists(st.lists(st.integers(0, n - 1), min_size=n, max_size=n), min_size=k, max_size=k))
    acc = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    initial = draw(st.integers(0, n - 1))
    return Dfa(n, k, np.array(delta, dtype=np.intp).reshape(k, n), np.array(acc, dtype=bool), initial)
