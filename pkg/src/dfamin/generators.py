"""Benchmark families: Fibonacci rings, bit-splitters, chains and random DFAs."""

from __future__ import annotations

import numpy as np

from .core import Dfa


def fib_word(n: int) -> str:
    """Fibonacci word with ``w_0 = "1"``, ``w_1 = "0"`` and ``w_{n+1} = w_n w_{n-1}``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    prev, cur = "1", "0"
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, cur + prev
    return cur


def fib_dfa(n: int) -> Dfa:
    """Unary ring of ``|w_n|`` states, accepting where the word has a 1."""
    if n < 2:
        raise ValueError("fib_dfa needs n >= 2")
    word = fib_word(n)
    size = len(word)
    delta = (np.arange(size) + 1) % size
    accepting = np.frombuffer(word.encode(), dtype=np.uint8) == ord("1")
    return Dfa(size, 1, delta.reshape(1, size), accepting, 0)


def fib_dfa_with_states(num_states: int) -> Dfa:
    """The Fibonacci automaton whose state count is exactly ``num_states``."""
    n = 2
    while len(fib_word(n)) < num_states:
        n += 1
    if len(fib_word(n)) != num_states:
        raise ValueError(f"{num_states} is not a Fibonacci word length")
    return fib_dfa(n)


def bit_splitter(n: int) -> Dfa:
    """Bit-splitter with ``2**n`` states and ``n - 1`` letters.

    A state is its bit string read as a binary number, leading bit most
    significant. Letter ``a_m`` (index ``m - 1``) was added when going from
    ``m`` to ``m + 1`` bits and acts on the low ``m + 1`` bits ``b sigma``:
    if ``sigma``'s leftmost bit is set it jumps to ``(not b) 0^m``, otherwise
    it stays put. Higher bits are untouched. Accepting states have the leading
    bit set.
    """
    if n < 1:
        raise ValueError("bit_splitter needs n >= 1")
    size = 1 << n
    q = np.arange(size, dtype=np.intp)
    delta = np.empty((n - 1, size), dtype=np.intp)
    for m in range(1, n):
        b = (q >> m) & 1
        lead = (q >> (m - 1)) & 1
        high = (q >> (m + 1)) << (m + 1)
        jump = high | ((1 - b) << m)
        delta[m - 1] = np.where(lead == 1, jump, q)
    accepting = (q >> (n - 1)) & 1 == 1
    return Dfa(size, n - 1, delta, accepting, 0)


def chain_dfa(length: int) -> Dfa:
    """``q_0 -> ... -> q_{len-1}`` on one letter, last state accepting with a self-loop."""
    if length < 2:
        raise ValueError("chain_dfa needs length >= 2")
    delta = np.minimum(np.arange(length) + 1, length - 1)
    return Dfa(length, 1, delta.reshape(1, length), [length - 1], 0)


def random_dfa(n: int, k: int, seed: int, accept_prob: float = 0.5) -> Dfa:
    """Uniform random complete DFA from a PCG64 stream seeded with ``seed``.

    Targets are drawn first (``k`` rows of ``n``), then one uniform float per
    state decides acceptance (``< accept_prob``). Initial state is 0.
    """
    if n < 1 or k < 1:
        raise ValueError("random_dfa needs n >= 1 and k >= 1")
    if not 0.0 <= accept_prob <= 1.0:
        raise ValueError("accept_prob must lie in [0, 1]")
    rng = np.random.Generator(np.random.PCG64(seed))
    delta = rng.integers(0, n, size=(k, n), dtype=np.int64)
    accepting = rng.random(n) < accept_prob
    return Dfa(n, k, delta, accepting, 0)
