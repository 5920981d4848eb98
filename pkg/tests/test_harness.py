import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fragile.errors import InsufficientData, InvalidConfig, IoFailure
from fragile.harness import (
    ExperimentConfig, SizeResult, TrialReport, aggregate, emit_report, fit_growth,
    merge_reports, render_report, run_experiment, run_trial, trial_rngs,
)


def test_tournament_eight_single_trial():
    r = run_experiment(ExperimentConfig("tournament", [8]))
    assert r.sizes[0].samples["f_target"] == [3]


def test_sample_min_mean_under_nine():
    r = run_experiment(ExperimentConfig("sample-min", [10 ** 4], trials=500, seed=7))
    assert r.sizes[0].stats("f_target")["mean"] <= 9
    assert not r.violations


def test_worst_linear_mergesort():
    r = run_experiment(ExperimentConfig("mergesort-linear", [2 ** 10], distribution="worst-linear"))
    assert r.sizes[0].samples["f_max"][0] >= 256


def test_every_algorithm_runs_on_every_distribution():
    for alg in ("tournament", "sample-min", "tree-min", "det-median", "r-median",
                "det-select", "mergesort-linear", "mergesort-exp", "heapify"):
        for dist in ("uniform-permutation", "sorted", "reverse", "worst-linear"):
            r = run_experiment(ExperimentConfig(alg, [2, 5, 64], trials=2, distribution=dist, rank=2))
            assert [s.trials for s in r.sizes] == [2, 2, 2]
            has_target = alg not in ("mergesort-linear", "mergesort-exp", "heapify")
            assert (r.sizes[0].samples["f_target"][0] is not None) == has_target


def test_trial_streams_depend_only_on_seed_size_and_index():
    a = trial_rngs(1, 100, 3)[0].integers(0, 2 ** 62, 4)
    b = trial_rngs(1, 100, 3)[0].integers(0, 2 ** 62, 4)
    c = trial_rngs(1, 100, 4)[0].integers(0, 2 ** 62, 4)
    assert a.tolist() == b.tolist() != c.tolist()
    cfg = ExperimentConfig("sample-min", [300, 500], trials=3, seed=4)
    alone = run_trial(cfg, 500, 2)
    assert run_experiment(cfg).sizes[1].samples["f_target"][2] == alone["f_target"]


def test_parallel_equals_serial():
    cfg = ExperimentConfig("tree-min", [64, 256, 1024], trials=6, seed=3, delta=4)
    a = render_report(run_experiment(cfg, workers=1))
    b = render_report(run_experiment(cfg, workers=2))
    assert a == b


def test_synthetic_fits():
    ns = [2 ** k for k in range(4, 12)]
    f = fit_growth([(n, 2.5 * math.log2(n)) for n in ns])
    assert f.best == "log n" and f.residual < 1e-20 and math.isclose(f.constant, 2.5)
    f = fit_growth([(n, 0.7 * math.log2(n) ** 2) for n in ns])
    assert f.best == "log^2 n"
    assert set(f.residuals) == {"log n", "log log n", "log^2 n", "n", "log n / log log n"}
    f = fit_growth([(n, 3 * math.log(n) / math.log(16)) for n in ns], delta=16)
    assert f.residuals["log_delta n"] < 1e-20
    with pytest.raises(InsufficientData):
        fit_growth([(8, 1), (16, 2)])


def test_tree_min_fit_is_reported():
    r = run_experiment(ExperimentConfig("tree-min", [2 ** 10, 2 ** 12, 2 ** 14, 2 ** 16], trials=20, delta=16))
    fit = r.fits()["f_target"]
    assert "log_delta n" in fit["residuals"]
    assert fit["best"] in fit["residuals"]


@given(st.lists(st.integers(0, 10 ** 6), min_size=1, max_size=200), st.randoms())
def test_aggregates_are_sane_and_order_free(xs, rnd):
    a = aggregate(xs)
    assert a["max"] >= a["p99"] >= a["p50"] >= 0
    assert min(xs) <= a["mean"] <= max(xs)
    ys = list(xs)
    rnd.shuffle(ys)
    assert aggregate(ys) == a


def test_emit_empty_and_single(tmp_path):
    p = emit_report(TrialReport({"algorithm": "tournament"}, []), tmp_path / "e.json")
    d = json.loads(open(p).read())
    assert d["per_size"] == [] and d["fits"] == {}
    r = run_experiment(ExperimentConfig("heapify", [31]))
    d = json.loads(open(emit_report(r, tmp_path / "one.json")).read())
    rec = d["per_size"][0]
    assert rec["trials"] == 1 and rec["f_max"]["max"] == rec["f_max"]["mean"]
    assert rec["f_target"] is None


def test_reports_are_byte_identical(tmp_path):
    cfg = ExperimentConfig("r-median", [100, 1000, 3000], trials=4, seed=9)
    for fmt in ("json", "csv"):
        a = emit_report(run_experiment(cfg), tmp_path / f"a.{fmt}", fmt)
        b = emit_report(run_experiment(cfg), tmp_path / f"b.{fmt}", fmt)
        assert open(a, "rb").read() == open(b, "rb").read()
    rows = open(tmp_path / "a.csv").read().splitlines()
    assert rows[0] == "n,metric,mean,max,p50,p99,trials" and len(rows) == 1 + 3 * 4


def test_emit_failure(tmp_path):
    with pytest.raises(IoFailure):
        emit_report(TrialReport({}, []), tmp_path)


@pytest.mark.parametrize("kw,field", [
    (dict(algorithm="bogus"), "algorithm"),
    (dict(sizes=[]), "sizes"),
    (dict(sizes=[0]), "sizes"),
    (dict(trials=0), "trials"),
    (dict(distribution="zipf"), "distribution"),
    (dict(algorithm="tree-min", delta=1), "delta"),
    (dict(preset="fast"), "preset"),
    (dict(halver="random:x"), "halver"),
    (dict(algorithm="det-select"), "rank"),
    (dict(algorithm="det-select", rank=9), "rank"),
    (dict(fmt="xml"), "fmt"),
    (dict(distribution="worst-linear", sizes=[1]), "sizes"),
])
def test_invalid_configs_name_the_field(kw, field):
    base = dict(algorithm="tournament", sizes=[8])
    base.update(kw)
    with pytest.raises(InvalidConfig) as e:
        ExperimentConfig(**base).validate()
    assert e.value.field == field


def test_from_dict_rejects_unknown_fields():
    with pytest.raises(InvalidConfig) as e:
        ExperimentConfig.from_dict({"algorithm": "tournament", "sizes": [4], "colour": 1})
    assert e.value.field == "colour"


def test_merge_reports_pools_trials():
    a = run_experiment(ExperimentConfig("sample-min", [64, 128], trials=3, seed=1))
    b = run_experiment(ExperimentConfig("sample-min", [128, 256], trials=2, seed=2))
    m = merge_reports(a, b)
    assert [s.n for s in m.sizes] == [64, 128, 256]
    assert m.sizes[1].samples["work"] == a.sizes[1].samples["work"] + b.sizes[0].samples["work"]
    rt = TrialReport.from_dict(json.loads(render_report(m)))
    assert render_report(rt) == render_report(m)
    c = run_experiment(ExperimentConfig("tournament", [64], trials=1))
    with pytest.raises(InvalidConfig):
        merge_reports(a, c)


def test_size_result_stats_skip_missing_target():
    s = SizeResult(4, {"f_target": [None], "f_max_rest": [1], "f_max": [1], "work": [2]})
    assert s.stats("f_target") is None and s.stats("work")["mean"] == 2
