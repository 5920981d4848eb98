"""Command line entry point: `fragile run|network|adversary|report`."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import harness, networks
from .adversaries import MergesortScapegoatAdversary, MinAdversary, ScapegoatAdversary, replay_consistent
from .core import new_ledger
from .errors import FragileError, InvalidConfig, IoFailure
from .minimum import sample_minimum, tournament_minimum
from .sorting import merge, mergesort

EXIT_OK, EXIT_CONFIG, EXIT_CHECK = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)


def _sizes(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None


ADVERSARY_ALGS = ("tournament", "sample-min", "linear", "exp")


def _distribution(text):
    return "uniform-permutation" if text == "random" else text


def _file_args(p):
    p.add_argument("file", nargs="?")
    p.add_argument("--file", dest="file_opt")


def build_parser():
    p = _Parser(prog="fragile", description="Measure per-element comparison counts of comparison algorithms.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run an experiment and write a report")
    r.add_argument("--config", help="JSON file with experiment fields; flags override it")
    r.add_argument("--algorithm", "--alg", choices=harness.ALGORITHMS)
    r.add_argument("--sizes", "--n", type=_sizes, help="comma separated input sizes")
    r.add_argument("--trials", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--distribution", "--input", type=_distribution,
                   help="uniform-permutation (or random), sorted, reverse, worst-linear")
    r.add_argument("--delta", type=int)
    r.add_argument("--preset", choices=sorted(harness.PRESETS))
    r.add_argument("--halver", help="exact, random:R or random:R:SEED")
    r.add_argument("--rank", "-t", type=int)
    r.add_argument("--output", help="report path (default: $%s/report-<algorithm>.<format>)" % harness.OUTPUT_DIR_ENV)
    r.add_argument("--format", dest="fmt", choices=("json", "csv"))
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--check", action="store_true", help="exit 3 if any per-trial bound is violated")

    n = sub.add_parser("network", help="build, verify or describe comparator networks")
    nsub = n.add_subparsers(dest="action", required=True, parser_class=_Parser)
    b = nsub.add_parser("build")
    b.add_argument("--width", "--n", type=int, required=True)
    b.add_argument("--kind", choices=("batcher", "sorter", "halver"), default="sorter")
    b.add_argument("--rounds", type=int, help="random matching rounds for a halver (exact sort if omitted)")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
    b.add_argument("--output")
    v = nsub.add_parser("verify")
    _file_args(v)
    v.add_argument("--check", action="store_true")
    s = nsub.add_parser("stats")
    _file_args(s)

    a = sub.add_parser("adversary", help="play an adversary against an algorithm")
    a.add_argument("--target", choices=("min", "merge", "mergesort"), required=True)
    a.add_argument("--n", type=int, required=True, help="input size (|A| = |B| = n for merge)")
    a.add_argument("--alg", "--variant", dest="alg", choices=ADVERSARY_ALGS,
                   help="tournament or sample-min against min; linear or exp against merge and mergesort")
    a.add_argument("--check", action="store_true")

    rep = sub.add_parser("report", help="work with report files")
    rsub = rep.add_subparsers(dest="action", required=True, parser_class=_Parser)
    m = rsub.add_parser("merge", help="pool the trials of several JSON reports")
    m.add_argument("inputs", nargs="+")
    m.add_argument("--output", required=True)
    m.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    return p


def _load_config(args):
    data = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as e:
            raise InvalidConfig("config", f"cannot read {args.config}: {e}") from None
        except json.JSONDecodeError as e:
            raise InvalidConfig("config", f"not valid JSON: {e}") from None
        if not isinstance(data, dict):
            raise InvalidConfig("config", "top level must be an object")
    for k in ("algorithm", "sizes", "trials", "seed", "distribution", "delta", "preset",
              "halver", "rank", "output", "fmt"):
        val = getattr(args, k)
        if val is not None:
            data[k] = val
    cfg = harness.ExperimentConfig.from_dict(data)
    return cfg.validate()


def cmd_run(args):
    cfg = _load_config(args)
    if args.workers < 1:
        raise InvalidConfig("workers", "workers must be at least 1")
    report = harness.run_experiment(cfg, workers=args.workers)
    path = cfg.output or os.path.join(harness.default_output_dir(), f"report-{cfg.algorithm}.{cfg.fmt}")
    harness.emit_report(report, path, cfg.fmt)
    for s in report.sizes:
        st = {m: s.stats(m) for m in harness.METRICS}
        ft = st["f_target"]
        print(f"n={s.n:<9} trials={s.trials:<6}"
              + (f" f_target mean={ft['mean']:.3f} max={ft['max']:g}" if ft else "")
              + f" f_max_rest max={st['f_max_rest']['max']:g} f_max max={st['f_max']['max']:g}"
              f" work mean={st['work']['mean']:.1f}")
    for metric, fit in report.fits().items():
        print(f"fit {metric}: {fit['best']} (c={fit['constant']:.4g}, residual={fit['residual']:.4g})")
    print(f"report written to {path}")
    if args.check and report.violations:
        for v in report.violations[:20]:
            print(f"VIOLATION {v}", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def _read_network(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e
    if text.lstrip().startswith("{"):
        return networks.from_json(text)
    return networks.from_text(text)


def cmd_network(args):
    if args.action == "build":
        if args.width < 1:
            raise InvalidConfig("width", "width must be positive")
        if args.kind == "batcher":
            net = networks.batcher_odd_even(args.width)
        elif args.kind == "sorter":
            net = networks.sorting_network(args.width)
        else:
            variant = networks.ExactSort() if args.rounds is None else networks.RandomMatching(args.rounds, args.seed)
            net = networks.build_halver(args.width, variant)
        text = networks.to_json(net) + "\n" if args.fmt == "json" else networks.to_text(net)
        if args.output:
            try:
                with open(args.output, "w", encoding="utf-8") as fh:
                    fh.write(text)
            except OSError as e:
                raise IoFailure(f"cannot write {args.output}: {e}") from e
        else:
            sys.stdout.write(text)
        return EXIT_OK
    path = args.file_opt or args.file
    if not path:
        raise InvalidConfig("file", "a network file is required")
    net = _read_network(path)
    if args.action == "verify":
        ok = networks.verify_sorting(net)
        print(f"width {net.width}: {'sorts' if ok else 'does not sort'} every 0-1 input")
        return EXIT_CHECK if args.check and not ok else EXIT_OK
    depth, size = networks.depth_and_size(net)
    print(f"width {net.width} depth {depth} size {size}")
    if net.width <= networks.MAX_VERIFY_WIDTH:
        print(f"halver epsilon {networks.measure_halver_epsilon(net):g}")
    return EXIT_OK


def _adv_min(n, alg):
    adv = MinAdversary(n)
    ledger = new_ledger(n)
    if alg == "sample-min":
        got = sample_minimum(list(range(n)), adv, ledger, np.random.default_rng(0)).minimum
    else:
        got = tournament_minimum(list(range(n)), adv, ledger).minimum
    order = adv.certify(got)
    count = int(ledger.counts[got])
    bound = math.ceil(math.log2(n)) if n > 1 else 0
    return count, bound, order[0] == got and replay_consistent(adv.history, order)


def _adv_merge(n, variant):
    A, B = list(range(n)), list(range(n, 2 * n))
    adv = ScapegoatAdversary(A, B)
    ledger = new_ledger(2 * n)
    out = merge(A, B, variant, adv, ledger)
    order = adv.certify()
    count = int(ledger.counts[adv.x])
    return count, int(math.log2(n)) + 1, out == order and replay_consistent(adv.history, order)


def _adv_mergesort(n, variant):
    adv = MergesortScapegoatAdversary(n)
    ledger = new_ledger(n)
    out = mergesort(list(range(n)), variant, adv, ledger)
    order = adv.certify()
    count = int(ledger.counts[adv.root_scapegoat])
    k = int(math.log2(n))
    bound = sum(i + 1 for i in range(k))
    return count, bound, out == order and replay_consistent(adv.history, order)


def cmd_adversary(args):
    if args.n < 1 or (args.target == "mergesort" and args.n < 2):
        raise InvalidConfig("n", "n too small for this adversary")
    alg = args.alg or ("tournament" if args.target == "min" else "linear")
    if (args.target == "min") != (alg in ("tournament", "sample-min")):
        raise InvalidConfig("alg", f"{alg} cannot be played against the {args.target} adversary")
    if args.target == "min":
        count, bound, ok = _adv_min(args.n, alg)
        what = f"claimed minimum ({alg})"
    elif args.target == "merge":
        count, bound, ok = _adv_merge(args.n, alg)
        what = f"scapegoat ({alg} merge)"
    else:
        count, bound, ok = _adv_mergesort(args.n, alg)
        what = f"root scapegoat ({alg} mergesort)"
    print(f"n={args.n}: {what} compared {count} times (lower bound {bound}); "
          f"answers {'consistent' if ok else 'INCONSISTENT'}")
    if args.check and (count < bound or not ok):
        return EXIT_CHECK
    return EXIT_OK


def cmd_report(args):
    reports = []
    for path in args.inputs:
        try:
            with open(path, encoding="utf-8") as fh:
                reports.append(harness.TrialReport.from_dict(json.load(fh)))
        except OSError as e:
            raise IoFailure(f"cannot read {path}: {e}") from e
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise InvalidConfig("inputs", f"{path} is not a JSON report: {e}") from None
    out = reports[0]
    for r in reports[1:]:
        out = harness.merge_reports(out, r)
    harness.emit_report(out, args.output, args.fmt)
    print(f"merged {len(reports)} reports into {args.output}")
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = {"run": cmd_run, "network": cmd_network, "adversary": cmd_adversary, "report": cmd_report}[args.command]
    try:
        return handler(args)
    except InvalidConfig as e:
        print(f"invalid config: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except AssertionError as e:
        print(f"assertion failed: {e}", file=sys.stderr)
        return EXIT_CHECK
    except IoFailure as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return 1
    except FragileError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
