"""Instrumented comparison algorithms for measuring fragile complexity."""

from .core import (
    ComparisonLedger, FragileSummary, Oracle, Outcome, PaddedOracle, ValueOracle,
    compare, fragile_summary, less, less_many, new_ledger,
)
from .networks import (
    Comparator, ComparatorNetwork, ExactSort, RandomMatching, batcher_odd_even, build_halver,
    check_signature_invariance, depth_and_size, execute, measure_halver_epsilon, network_sort,
    selection_to_partition, sorting_network, verify_sorting,
)
from .minimum import MinResult, TreeParams, sample_minimum, tournament_minimum, tree_minimum
from .selection import LOGLOG, SUBLOG, SelectionParams, det_median, det_select, r_median
from .sorting import HeapArray, MergeVariant, floyd_heapify, merge, mergesort, worst_case_linear_input
from .adversaries import (
    MergesortScapegoatAdversary, MinAdversary, ScapegoatAdversary,
    merge_scapegoat_answer, mergesort_scapegoat_compose, min_adversary_answer, min_adversary_certify,
)
from .harness import ExperimentConfig, TrialReport, emit_report, fit_growth, merge_reports, run_experiment
