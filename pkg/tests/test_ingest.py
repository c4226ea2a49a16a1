import itertools

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import dfas, nfa_accepts, random_lts, run_word
from dfamin.core import Dfa, Lts, canonicalize
from dfamin.generators import bit_splitter, chain_dfa, fib_dfa, random_dfa
from dfamin.ingest import (DfaFormatError, LtsParseError, StateBudgetExceeded, SubsetAutomaton, complete,
                           determinize, lts_to_dfa, parse_lts, read_dfa, read_partition, write_dfa,
                           write_partition)


def aut(initial, states, transitions):
    lines = [f"des ({initial}, {len(transitions)}, {states})"]
    lines += [f'({s}, "{l}", {d})' for s, l, d in transitions]
    return "\n".join(lines) + "\n"


class TestParse:
    def test_minimal(self):
        lts = parse_lts('des (0, 1, 2)\n(0, "a", 1)\n')
        assert lts.num_states == 2 and lts.initial == 0
        assert lts.transitions == ((0, "a", 1),)

    def test_count_mismatch(self):
        with pytest.raises(LtsParseError):
            parse_lts('des (0, 2, 2)\n(0, "a", 1)\n')

    def test_duplicates_kept(self):
        lts = parse_lts('des (0, 2, 2)\n(0, "a", 1)\n(0, "a", 1)\n')
        assert len(lts.transitions) == 2

    def test_label_order_first_appearance(self):
        lts = parse_lts(aut(0, 3, [(0, "z", 1), (1, "b", 2), (2, "z", 0), (0, "a", 0)]))
        assert lts.labels == ["z", "b", "a"]

    def test_unquoted_and_spaced_labels(self):
        lts = parse_lts('des (0, 2, 2)\n(0, i, 1)\n(1, "send !1 !2", 0)\n')
        assert lts.labels == ["i", "send !1 !2"]

    def test_out_of_range_state(self):
        with pytest.raises(LtsParseError) as exc:
            parse_lts('des (0, 1, 2)\n(0, "a", 2)\n')
        assert exc.value.line == 2

    def test_malformed_line_reports_number(self):
        with pytest.raises(LtsParseError) as exc:
            parse_lts('des (0, 2, 2)\n(0, "a", 1)\n0 a 1\n')
        assert exc.value.line == 3

    def test_missing_header(self):
        with pytest.raises(LtsParseError):
            parse_lts('(0, "a", 1)\n')


class TestDeterminize:
    def test_deterministic_input_isomorphic(self):
        lts = Lts(2, 0, ((0, "a", 1), (1, "a", 0)))
        d = lts_to_dfa(lts)
        assert d.num_states == 2
        assert d.delta.tolist() == [[1, 0]]
        assert d.accepting.all()

    def test_union_successor(self):
        sa = determinize(Lts(3, 0, ((0, "a", 1), (0, "a", 2))))
        assert (1, 2) in sa.subsets

    def test_hand_expanded_table(self):
        # {0} -a-> {1,2}; {1,2} -b-> {0,2}; {0,2} -a-> {1,2}, -b-> {2}; {2} -b-> {2}
        sa = determinize(Lts(3, 0, ((0, "a", 1), (0, "a", 2), (1, "b", 0), (2, "b", 2))))
        assert sa.subsets == ((0,), (1, 2), (0, 2), (2,))
        assert sa.labels == ("a", "b")
        assert sa.table.tolist() == [[1, -1, 1, -1], [-1, 2, 3, 3]]

    def test_budget(self):
        # every subset of {0..7} containing 0 is reachable
        trans = [(q, "a", (q + 1) % 8) for q in range(8)] + [(q, "b", q) for q in range(8)] + [(0, "b", 1)]
        lts = Lts(8, 0, tuple(trans))
        with pytest.raises(StateBudgetExceeded):
            determinize(lts, max_states=4)
        assert determinize(lts).num_states > 4

    def test_at_most_one_successor(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            sa = determinize(random_lts(rng, 10, 3, 30))
            assert sa.table.shape == (len(sa.labels), sa.num_states)
            assert (sa.table >= -1).all() and (sa.table < sa.num_states).all()


class TestComplete:
    def test_complete_input_unchanged(self):
        sa = determinize(Lts(2, 0, ((0, "a", 1), (1, "a", 0))))
        d = complete(sa)
        assert d.num_states == sa.num_states

    def test_single_state_missing_letter(self):
        sa = SubsetAutomaton(("a",), ((0,),), np.array([[-1]]), 0)
        d = complete(sa)
        assert d.num_states == 2
        assert d.delta.tolist() == [[1, 1]]
        assert d.accepting_states == [0]

    def test_partial_chain_words(self):
        lts = Lts(3, 0, ((0, "a", 1), (1, "b", 2)))
        d = lts_to_dfa(lts)
        labels = lts.labels
        for length in range(7):
            for w in itertools.product(range(2), repeat=length):
                assert run_word(d, w) == nfa_accepts(lts, labels, w)
        assert d.accepting_states == [0, 1, 2]
        assert d.num_states == 4

    def test_pipeline_deterministic(self):
        text = aut(1, 4, [(1, "x", 2), (1, "x", 3), (2, "y", 0), (3, "y", 1), (0, "x", 0)])
        assert write_dfa(lts_to_dfa(parse_lts(text))) == write_dfa(lts_to_dfa(parse_lts(text)))

    def test_random_word_sampling(self):
        rng = np.random.default_rng(17)
        for _ in range(30):
            lts = random_lts(rng, 12, 3, 25)
            d = lts_to_dfa(lts)
            for _ in range(50):
                w = rng.integers(0, max(1, d.alphabet_size), size=int(rng.integers(0, 9)))
                if d.alphabet_size == 0:
                    w = w[:0]
                assert run_word(d, w) == nfa_accepts(lts, lts.labels, w)


class TestDfaFormat:
    def test_chain3_text(self):
        assert write_dfa(chain_dfa(3)) == "DFA 1 3 1 0\nACC 1 2\n0: 1 2 2\n"

    @pytest.mark.parametrize("make", [lambda: fib_dfa(7), lambda: bit_splitter(4), lambda: bit_splitter(1),
                                      lambda: random_dfa(30, 3, 1, 0.0)])
    def test_round_trip(self, make):
        d = make()
        text = write_dfa(d)
        assert read_dfa(text) == d
        assert write_dfa(read_dfa(text)) == text

    @given(dfas())
    def test_round_trip_property(self, d):
        assert read_dfa(write_dfa(d)) == d

    def test_truncated_names_section(self):
        text = write_dfa(chain_dfa(3))
        with pytest.raises(DfaFormatError, match="ACC"):
            read_dfa(text.splitlines()[0] + "\n")
        with pytest.raises(DfaFormatError, match="transition"):
            read_dfa("\n".join(text.splitlines()[:2]) + "\n")

    def test_version_mismatch(self):
        with pytest.raises(DfaFormatError):
            read_dfa("DFA 2 3 1 0\nACC 1 2\n0: 1 2 2\n")

    def test_dimension_mismatch(self):
        with pytest.raises(DfaFormatError):
            read_dfa("DFA 1 3 1 0\nACC 1 2\n0: 1 2\n")

    def test_entry_out_of_range(self):
        with pytest.raises(DfaFormatError):
            read_dfa("DFA 1 3 1 0\nACC 1 2\n0: 1 2 3\n")


class TestPartitionFormat:
    def test_text(self):
        assert write_partition(canonicalize([3, 3, 1])) == "0 0\n1 0\n2 1\n"

    @given(dfas())
    def test_round_trip(self, d):
        p = canonicalize(d.delta[0])
        text = write_partition(p)
        assert read_partition(text) == p
        assert write_partition(read_partition(text)) == text
