"""Monte-Carlo experiment runner, growth-curve fitting and report files."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .core import ValueOracle, fragile_summary, new_ledger
from .errors import InsufficientData, InvalidConfig, IoFailure
from .minimum import TreeParams, sample_minimum, tournament_minimum, tree_minimum
from .networks import ExactSort, RandomMatching
from .selection import PRESETS, det_median, det_select, r_median
from .sorting import floyd_heapify, mergesort, worst_case_linear_input

ALGORITHMS = (
    "tournament", "sample-min", "tree-min",
    "det-median", "r-median", "det-select",
    "mergesort-linear", "mergesort-exp", "heapify",
)
DISTRIBUTIONS = ("uniform-permutation", "sorted", "reverse", "worst-linear")
METRICS = ("f_target", "f_max_rest", "f_max", "work")
OUTPUT_DIR_ENV = "FRAGILE_OUTPUT_DIR"


@dataclass
class ExperimentConfig:
    algorithm: str
    sizes: list
    trials: int = 1
    seed: int = 0
    distribution: str = "uniform-permutation"
    delta: Optional[int] = None
    preset: str = "loglog"
    halver: str = "exact"
    rank: Optional[int] = None
    output: Optional[str] = None
    fmt: str = "json"

    def validate(self):
        if self.algorithm not in ALGORITHMS:
            raise InvalidConfig("algorithm", f"unknown algorithm {self.algorithm!r}")
        if not self.sizes or any(not isinstance(n, int) or n < 1 for n in self.sizes):
            raise InvalidConfig("sizes", "sizes must be a non-empty list of positive integers")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise InvalidConfig("trials", "trials must be at least 1")
        if self.distribution not in DISTRIBUTIONS:
            raise InvalidConfig("distribution", f"unknown distribution {self.distribution!r}")
        if self.distribution == "worst-linear" and min(self.sizes) < 2:
            raise InvalidConfig("sizes", "worst-linear input needs n >= 2")
        if self.algorithm == "tree-min" and self.delta is not None and self.delta < 2:
            raise InvalidConfig("delta", "delta must be at least 2")
        if self.preset not in PRESETS:
            raise InvalidConfig("preset", f"unknown preset {self.preset!r}")
        try:
            halver_variant(self.halver)
        except ValueError as e:
            raise InvalidConfig("halver", str(e)) from None
        if self.algorithm == "det-select":
            if self.rank is None:
                raise InvalidConfig("rank", "det-select needs a rank")
            if self.rank < 1 or self.rank > min(self.sizes):
                raise InvalidConfig("rank", f"rank {self.rank} outside 1..{min(self.sizes)}")
        if self.fmt not in ("json", "csv"):
            raise InvalidConfig("fmt", "format must be json or csv")
        return self

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise InvalidConfig(sorted(extra)[0], "unknown config field")
        if "algorithm" not in d:
            raise InvalidConfig("algorithm", "missing")
        if "sizes" not in d:
            raise InvalidConfig("sizes", "missing")
        return cls(**d)


def halver_variant(spec: str):
    """'exact', 'random:R' or 'random:R:SEED'."""
    if spec == "exact":
        return ExactSort()
    parts = spec.split(":")
    if parts[0] == "random" and len(parts) in (2, 3):
        try:
            r = int(parts[1])
            s = int(parts[2]) if len(parts) == 3 else 0
        except ValueError:
            raise ValueError(f"bad halver spec {spec!r}") from None
        if r >= 1:
            return RandomMatching(r, s)
    raise ValueError(f"bad halver spec {spec!r}")


def trial_rngs(seed, n, trial):
    """Independent input and algorithm streams for one trial."""
    ss = np.random.SeedSequence([seed, n, trial])
    a, b = ss.spawn(2)
    return np.random.Generator(np.random.Philox(a)), np.random.Generator(np.random.Philox(b))


def make_input(distribution, n, rng):
    if distribution == "uniform-permutation":
        return rng.permutation(n)
    if distribution == "sorted":
        return np.arange(n)
    if distribution == "reverse":
        return np.arange(n)[::-1].copy()
    return np.asarray(worst_case_linear_input(n))


def rank_id(values, r):
    """Id of the element of 0-based rank r, ties broken by id."""
    return int(np.argsort(values, kind="stable")[r])


def bound_checks(alg, n, s, delta=None):
    """Worst-case bounds that must hold on every single trial; returns failures."""
    lg = math.log2(n) if n > 1 else 0.0
    clg = math.ceil(lg)
    bad = []
    if alg == "tournament":
        # byes make the bound exact only for powers of two
        if s.f_target > clg or (n & (n - 1) == 0 and s.f_target != clg):
            bad.append(f"minimum count {s.f_target} vs ceil(log2 n) = {clg}")
    if alg == "sample-min" and s.f_target > 3 * clg:
        bad.append(f"minimum count {s.f_target} > 3*ceil(log2 n) = {3 * clg}")
    if alg == "tree-min" and n > 1:
        cap = delta + 9 * (math.log(n) / math.log(delta)) * 3
        if s.f_max_rest > cap:
            bad.append(f"non-minimum count {s.f_max_rest} > {cap}")
    if alg == "mergesort-exp" and s.f_max > 4 * lg * lg:
        bad.append(f"f_max {s.f_max} > 4*log2(n)^2")
    if alg == "heapify" and n > 1:
        if s.f_max > 3 * lg:
            bad.append(f"f_max {s.f_max} > 3*log2 n")
        if s.work > 2 * n:
            bad.append(f"work {s.work} > 2n")
    return bad


def run_trial(cfg: ExperimentConfig, n: int, trial: int) -> dict:
    in_rng, rng = trial_rngs(cfg.seed, n, trial)
    values = make_input(cfg.distribution, n, in_rng)
    oracle = ValueOracle(values)
    ledger = new_ledger(n)
    ids = np.arange(n)
    alg = cfg.algorithm
    target = None
    delta = cfg.delta or 16
    if alg in ("tournament", "sample-min", "tree-min"):
        if alg == "tournament":
            got = tournament_minimum(ids, oracle, ledger).minimum
        elif alg == "sample-min":
            got = sample_minimum(ids, oracle, ledger, rng).minimum
        else:
            got = tree_minimum(ids, TreeParams(delta), oracle, ledger, rng)
        target = int(np.argmin(values))
    elif alg in ("det-median", "r-median", "det-select"):
        halver = halver_variant(cfg.halver)
        if alg == "det-median":
            got = det_median(ids, oracle, ledger, halver)
            target = rank_id(values, (n - 1) // 2)
        elif alg == "r-median":
            got = r_median(ids, PRESETS[cfg.preset], oracle, ledger, rng, halver=halver)
            target = rank_id(values, (n - 1) // 2)
        else:
            got = det_select(ids, cfg.rank, oracle, ledger, halver)
            target = rank_id(values, cfg.rank - 1)
    elif alg.startswith("mergesort"):
        out = mergesort(ids, "linear" if alg == "mergesort-linear" else "exp", oracle, ledger)
        got = target = None
        if out != np.argsort(values, kind="stable").tolist():
            raise AssertionError(f"{alg} produced an unsorted output at n={n}, trial {trial}")
    else:
        heap = floyd_heapify(ids, oracle, ledger)
        got = target = None
        if not heap.is_valid(values):
            raise AssertionError(f"heapify produced an invalid heap at n={n}, trial {trial}")
    if got != target:
        raise AssertionError(f"{alg} returned {got}, expected {target} (n={n}, trial {trial})")
    if 2 * ledger.work != int(ledger.counts.sum()):
        raise AssertionError("ledger conservation violated")
    s = fragile_summary(ledger, target)
    return {
        "f_target": s.f_target,
        "f_max_rest": s.f_max_rest,
        "f_max": s.f_max,
        "work": s.work,
        "violations": bound_checks(alg, n, s, delta),
    }


def aggregate(xs):
    a = np.asarray(xs, dtype=np.float64)
    return {
        "mean": float(a.mean()),
        "max": float(a.max()),
        "p50": float(np.percentile(a, 50)),
        "p99": float(np.percentile(a, 99)),
    }


@dataclass
class SizeResult:
    n: int
    samples: dict
    violations: list = field(default_factory=list)

    @property
    def trials(self):
        return len(self.samples["f_max"])

    def stats(self, metric):
        xs = self.samples.get(metric)
        if xs is None or any(x is None for x in xs):
            return None
        return aggregate(xs)


@dataclass
class FitResult:
    best: str
    constant: float
    residual: float
    constants: dict
    residuals: dict

    def to_dict(self):
        return asdict(self)


def _candidates(delta=None):
    c = {
        "log n": lambda n: math.log2(n),
        "log log n": lambda n: math.log2(math.log2(n)),
        "log^2 n": lambda n: math.log2(n) ** 2,
        "n": lambda n: float(n),
        "log n / log log n": lambda n: math.log2(n) / math.log2(math.log2(n)),
    }
    if delta:
        c["log_delta n"] = lambda n: math.log(n) / math.log(delta)
    return c


def fit_growth(samples, candidates=None, delta=None) -> FitResult:
    """One-constant least squares y = c*g(n) for each candidate curve g.

    `samples` is a list of (n, y).  Residual is the sum of squared errors; the
    best curve is the first candidate reaching the minimum.
    """
    pts = sorted((int(n), float(y)) for n, y in samples)
    if len({n for n, _ in pts}) < 3:
        raise InsufficientData("fitting needs at least three distinct sizes")
    if min(n for n, _ in pts) < 3:
        raise InsufficientData("fitting needs sizes of at least 3")
    funcs = _candidates(delta)
    if candidates is not None:
        funcs = {k: funcs[k] for k in candidates}
    y = np.array([v for _, v in pts])
    constants, residuals = {}, {}
    for name, g in funcs.items():
        x = np.array([g(n) for n, _ in pts])
        c = float(x @ y / (x @ x))
        constants[name] = c
        residuals[name] = float(((y - c * x) ** 2).sum())
    low = min(residuals.values())
    best = next(k for k, r in residuals.items() if r <= low * (1 + 1e-9) + 1e-12)
    return FitResult(best, constants[best], residuals[best], constants, residuals)


@dataclass
class TrialReport:
    config: dict
    sizes: list

    def fits(self):
        out = {}
        if len(self.sizes) < 3 or min(s.n for s in self.sizes) < 3:
            return out
        delta = None
        if self.config.get("algorithm") == "tree-min":
            delta = self.config.get("delta") or 16
        for m in METRICS:
            st = [(s.n, s.stats(m)) for s in self.sizes]
            if any(v is None for _, v in st):
                continue
            out[m] = fit_growth([(n, v["mean"]) for n, v in st], delta=delta).to_dict()
        return out

    @property
    def violations(self):
        return [v for s in self.sizes for v in s.violations]

    def to_dict(self):
        per = []
        for s in self.sizes:
            rec = {"n": s.n, "trials": s.trials, "violations": len(s.violations), "samples": s.samples}
            for m in METRICS:
                rec[m] = s.stats(m)
            per.append(rec)
        return {"config": self.config, "per_size": per, "fits": self.fits()}

    @classmethod
    def from_dict(cls, d):
        sizes = [SizeResult(r["n"], {m: list(r["samples"][m]) for m in METRICS}) for r in d["per_size"]]
        return cls(d["config"], sizes)


def _task(args):
    cfg, n, t = args
    return run_trial(cfg, n, t)


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> TrialReport:
    """Run every (size, trial) pair; results do not depend on `workers`."""
    cfg.validate()
    tasks = [(cfg, n, t) for n in cfg.sizes for t in range(cfg.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        results = [_task(t) for t in tasks]
    sizes = []
    for i, n in enumerate(cfg.sizes):
        chunk = results[i * cfg.trials:(i + 1) * cfg.trials]
        samples = {m: [r[m] for r in chunk] for m in METRICS}
        viol = [f"n={n} trial {t}: {v}" for t, r in enumerate(chunk) for v in r["violations"]]
        sizes.append(SizeResult(n, samples, viol))
    return TrialReport(cfg.to_dict(), sizes)


def merge_reports(a: TrialReport, b: TrialReport) -> TrialReport:
    """Pool the trials of two reports of the same experiment."""
    ka = {k: v for k, v in a.config.items() if k not in ("seed", "trials", "sizes", "output", "fmt")}
    kb = {k: v for k, v in b.config.items() if k not in ("seed", "trials", "sizes", "output", "fmt")}
    if ka != kb:
        diff = sorted(k for k in ka if ka[k] != kb.get(k))
        raise InvalidConfig(diff[0] if diff else "config", "reports describe different experiments")
    by_n = {}
    for s in a.sizes + b.sizes:
        cur = by_n.setdefault(s.n, {m: [] for m in METRICS})
        for m in METRICS:
            cur[m].extend(s.samples[m])
    config = dict(a.config)
    config["sizes"] = sorted(by_n)
    config["seed"] = [a.config.get("seed"), b.config.get("seed")]
    config["trials"] = None
    return TrialReport(config, [SizeResult(n, by_n[n]) for n in sorted(by_n)])


def render_report(report: TrialReport, fmt: str = "json") -> str:
    d = report.to_dict()
    if fmt == "json":
        return json.dumps(d, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "metric", "mean", "max", "p50", "p99", "trials"])
    for rec in d["per_size"]:
        for m in METRICS:
            st = rec[m]
            if st is None:
                continue
            w.writerow([rec["n"], m, repr(st["mean"]), repr(st["max"]), repr(st["p50"]), repr(st["p99"]), rec["trials"]])
    return buf.getvalue()


def emit_report(report: TrialReport, path, fmt: str = "json"):
    """Write the report; the same report always produces the same bytes."""
    text = render_report(report, fmt)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as e:
        raise IoFailure(f"cannot write report to {path}: {e}") from e
    return path


def default_output_dir():
    return os.environ.get(OUTPUT_DIR_ENV, ".")
