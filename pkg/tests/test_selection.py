import itertools
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fragile.core import ValueOracle, new_ledger
from fragile.errors import EmptyInput, RankOutOfRange
from fragile.networks import ExactSort, RandomMatching, sorting_network
from fragile.selection import LOGLOG, SUBLOG, det_median, det_select, r_median

import oracles


def median_of(values, fn=det_median, **kw):
    led = new_ledger(len(values))
    return fn(range(len(values)), ValueOracle(values), led, **kw), led


@pytest.mark.parametrize("n", range(1, 17))
def test_det_median_base_case(n):
    vals = np.random.default_rng(n).permutation(n)
    got, _ = median_of(vals)
    assert got == oracles.rank_id(vals, (n - 1) // 2)


def test_det_median_sample_of_permutations_of_nine():
    perms = list(itertools.permutations(range(1, 10)))
    rng = np.random.default_rng(0)
    for i in rng.choice(len(perms), 3000, replace=False):
        p = perms[i]
        got, _ = median_of(p)
        assert p[got] == 5


@given(st.lists(st.integers(0, 30), min_size=1, max_size=3000), st.sampled_from(["exact", "random"]))
def test_det_median_matches_sorting(values, halver):
    h = ExactSort() if halver == "exact" else RandomMatching(3, 1)
    got, led = median_of(values, halver=h)
    assert got == oracles.rank_id(values, (len(values) - 1) // 2)


def test_det_median_trace_rounds_shrink():
    vals = np.random.default_rng(5).permutation(2 ** 14)
    trace = []
    got, led = median_of(vals, trace=trace)
    assert vals[got] == (2 ** 14 - 1) // 2
    assert trace and all(r.size > 0 for r in trace)
    sizes = [r.size for r in trace]
    assert sizes == sorted(sizes, reverse=True)
    assert all(r.discarded >= 0 for r in trace)


def test_det_select_small_examples():
    vals = [3, 1, 2]
    led = new_ledger(3)
    assert vals[det_select(range(3), 2, ValueOracle(vals), led)] == 2
    vals = [9, 4, 7, 1, 8]
    assert det_select(range(5), 1, ValueOracle(vals), new_ledger(5)) == 3
    with pytest.raises(RankOutOfRange):
        det_select(range(5), 6, ValueOracle(vals), new_ledger(5))
    with pytest.raises(RankOutOfRange):
        det_select(range(5), 0, ValueOracle(vals), new_ledger(5))


def test_det_select_every_rank_every_permutation_of_eight():
    for p in itertools.permutations(range(1, 9)):
        for t in range(1, 9):
            led = new_ledger(8)
            assert p[det_select(range(8), t, ValueOracle(p), led)] == t


@given(st.integers(1, 2500), st.data())
def test_det_select_matches_sorting(n, data):
    t = data.draw(st.integers(1, n))
    vals = np.random.default_rng(n).integers(0, n, n)
    led = new_ledger(n)
    got = det_select(range(n), t, ValueOracle(vals), led)
    assert got == oracles.rank_id(vals, t - 1)
    # padding elements never reach the ledger
    assert led.n == n and 2 * led.work == led.counts.sum()


@pytest.mark.parametrize("params", [LOGLOG, SUBLOG], ids=["loglog", "sublog"])
def test_r_median_every_permutation_of_seven(params):
    rng = np.random.default_rng(11)
    for p in itertools.permutations(range(1, 8)):
        got = r_median(range(7), params, ValueOracle(p), new_ledger(7), rng)
        assert p[got] == 4


@given(st.integers(1, 40000), st.integers(0, 10 ** 6), st.sampled_from(["loglog", "sublog"]),
       st.booleans())
def test_r_median_matches_sorting(n, seed, preset, ties):
    rng = np.random.default_rng(seed)
    vals = rng.integers(0, max(1, n // 4), n) if ties else rng.permutation(n)
    led = new_ledger(n)
    got = r_median(range(n), preset, ValueOracle(vals), led, rng)
    assert got == oracles.rank_id(vals, (n - 1) // 2)


def test_r_median_trace_and_bucket_fairness():
    n = 2 ** 16
    for seed in range(3):
        rng = np.random.default_rng(seed)
        vals = rng.permutation(n)
        trace = []
        got = r_median(range(n), LOGLOG, ValueOracle(vals), new_ledger(n), rng, trace=trace)
        assert vals[got] == (n - 1) // 2
        top = trace[0]
        assert top.n == n and top.outcome in ("recurse", "sorted-center", "fallback-imbalanced", "fallback-bounds")
        if top.buckets:
            assert top.left + top.right + top.center <= n
            for side, i, initial, absorbed, maxload, window in top.buckets:
                # least-loaded assignment keeps every pivot near the average load
                assert maxload <= absorbed / initial + window


def test_r_median_base_case_small_n():
    trace = []
    vals = [5, 2, 9, 1]
    got = r_median(range(4), LOGLOG, ValueOracle(vals), new_ledger(4), np.random.default_rng(0), trace=trace)
    assert got == 1 and trace[0].outcome == "base"
    with pytest.raises(EmptyInput):
        r_median([], LOGLOG, ValueOracle([]), new_ledger(0), np.random.default_rng(0))


def test_r_median_below_log4_threshold_is_one_sort():
    n = 2 ** 15  # log2(n)^4 = 50625 > n
    rng = np.random.default_rng(0)
    vals = rng.permutation(n)
    led, trace = new_ledger(n), []
    r_median(range(n), LOGLOG, ValueOracle(vals), led, rng, trace=trace)
    assert [lv.outcome for lv in trace] == ["base"]
    assert led.work == sorting_network(n).size


def test_r_median_filtering_beats_sorting():
    n = 2 ** 17
    rng = np.random.default_rng(1)
    vals = rng.permutation(n)
    led, trace = new_ledger(n), []
    got = r_median(range(n), LOGLOG, ValueOracle(vals), led, rng, trace=trace)
    assert vals[got] == (n - 1) // 2
    assert trace[0].outcome != "base"
    assert led.work < sorting_network(n).size
