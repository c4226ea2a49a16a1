import numpy as np
import pytest
from hypothesis import given, settings

from conftest import dfas
from dfamin.core import Dfa, MinimizationTimeout, canonicalize, moore_oracle
from dfamin.generators import bit_splitter, chain_dfa, fib_dfa_with_states, random_dfa
from dfamin.parallel import RacePolicy, SharedArray, par_for
from dfamin.partref import BOTTOM, initial_leaders, naive_pr, naive_pr_cas


def reference_naive_pr(dfa, policy=RacePolicy.MIN):
    """Per-(state, letter) bodies through par_for; leader arrays after each splitting pass."""
    n, k = dfa.num_states, dfa.alphabet_size
    delta = [[int(x) for x in row] for row in dfa.delta]
    block = SharedArray(initial_leaders(dfa))
    new_leader = SharedArray(np.full(n, BOTTOM))
    history = []
    while True:
        frozen = block.data.copy()

        def differs(i):
            q, a = divmod(i, k)
            return frozen[delta[a][q]] != frozen[delta[a][frozen[q]]]

        hits = SharedArray(np.zeros(1, dtype=int))

        def elect(i):
            if differs(i):
                new_leader.write(frozen[i // k], i // k)
                hits.write(0, 1)

        par_for(range(n * k), elect, policy, shared=[new_leader, hits])
        if not hits.data[0]:
            return canonicalize(block.data), len(history) + 1, history

        def split(i):
            if differs(i):
                block.write(i // k, new_leader[frozen[i // k]])

        par_for(range(n * k), split, policy, shared=[block])
        new_leader.data[:] = BOTTOM
        history.append(block.data.copy())


def refines(fine, coarse):
    seen = {}
    return all(seen.setdefault(f, c) == c for f, c in zip(fine, coarse))


class TestLeaders:
    def test_initial(self):
        d = Dfa.build([[0, 0, 0, 0]], [1, 3])
        assert initial_leaders(d).tolist() == [0, 1, 0, 1]

    def test_single_class(self):
        d = random_dfa(10, 2, 0, accept_prob=1.0)
        assert (initial_leaders(d) == 0).all()


class TestNaivePr:
    @pytest.mark.parametrize("seed", range(10))
    def test_matches_reference_trace(self, seed):
        d = random_dfa(60, 2, seed)
        trace = []
        p, stats = naive_pr(d, RacePolicy.MIN, trace=trace)
        ref_p, ref_iters, ref_hist = reference_naive_pr(d, RacePolicy.MIN)
        assert p == ref_p
        assert stats.iterations == ref_iters
        assert len(trace) == len(ref_hist)
        for a, b in zip(trace, ref_hist):
            assert a.tolist() == b.tolist()

    def test_reference_bits(self):
        ref_p, iters, _ = reference_naive_pr(bit_splitter(5))
        assert ref_p.num_blocks == 32
        assert naive_pr(bit_splitter(5), RacePolicy.MIN)[1].iterations == iters

    @pytest.mark.parametrize("policy", list(RacePolicy))
    @pytest.mark.parametrize("seed", range(5))
    def test_trace_invariants(self, policy, seed):
        d = random_dfa(120, 3, seed, accept_prob=0.3)
        trace = []
        naive_pr(d, policy, rng=np.random.default_rng(seed), trace=trace)
        prev = initial_leaders(d)
        blocks = [len(set(prev.tolist()))]
        for cur in trace:
            assert (cur[cur] == cur).all()
            assert refines(cur.tolist(), prev.tolist())
            blocks.append(len(set(cur.tolist())))
            prev = cur
        for i, b in enumerate(blocks):
            assert b <= 2 ** (i + 1)
        # binary splitting: at most one new block per old block
        for a, b in zip(blocks, blocks[1:]):
            assert b <= 2 * a

    def test_all_accepting(self):
        p, stats = naive_pr(random_dfa(20, 2, 1, 1.0))
        assert p.num_blocks == 1 and stats.iterations == 1

    @pytest.mark.parametrize("n", [8, 13, 21, 34, 55])
    def test_fibonacci_pinning(self, n):
        p, stats = naive_pr(fib_dfa_with_states(n), RacePolicy.MIN)
        assert p.num_blocks == n and stats.iterations == n - 1

    @settings(max_examples=150, deadline=None)
    @given(dfas(max_states=12))
    def test_oracle_every_policy(self, d):
        oracle = moore_oracle(d)
        for policy in RacePolicy:
            assert naive_pr(d, policy, rng=np.random.default_rng(0))[0] == oracle

    def test_timeout(self):
        with pytest.raises(MinimizationTimeout) as exc:
            naive_pr(fib_dfa_with_states(6765), timeout_ms=1)
        assert exc.value.stats.status == "timeout"


class TestCas:
    def test_bits10_matches_naive(self):
        d = bit_splitter(10)
        assert naive_pr_cas(d)[0] == naive_pr(d)[0]

    def test_chain64(self):
        p, _ = naive_pr_cas(chain_dfa(64))
        assert p.num_blocks == 64 == moore_oracle(chain_dfa(64)).num_blocks

    def test_one_state(self):
        p, stats = naive_pr_cas(Dfa.build([[0]], [0]))
        assert p.num_blocks == 1 and stats.iterations == 1

    @pytest.mark.parametrize("seed", range(5))
    def test_leader_consistency_shuffled(self, seed):
        trace = []
        d = random_dfa(100, 2, seed)
        naive_pr_cas(d, rng=np.random.default_rng(seed), trace=trace)
        for cur in trace:
            assert (cur[cur] == cur).all()

    @settings(max_examples=150, deadline=None)
    @given(dfas(max_states=12))
    def test_equals_naive(self, d):
        assert naive_pr_cas(d)[0] == naive_pr(d, RacePolicy.MIN)[0] == moore_oracle(d)
