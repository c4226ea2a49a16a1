"""Parallel DFA minimization: transitive closure, leader-election and sorting
partition refinement, and refinement after a partial transitive closure."""

from .core import (CapacityExceeded, Dfa, DfaminError, InconsistentPartitionError, Lts,
                   MinimizationTimeout, Partition, RunStats, canonicalize, language_equivalent,
                   moore_oracle, partitions_equal, quotient, remove_unreachable)
from .generators import bit_splitter, chain_dfa, fib_dfa, fib_word, random_dfa
from .ingest import complete, determinize, parse_lts, read_dfa, write_dfa
from .parallel import RacePolicy
from .partref import naive_pr, naive_pr_cas
from .sortpr import sort_pr
from .trans import trans_minimize
from .transpr import expand_alphabet, trans_pr

__version__ = "0.1.0"
