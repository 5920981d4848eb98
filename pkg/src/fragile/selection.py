"""Median and rank selection.

det_median shrinks the input with halver cascades and pivot marking, then
sorts what is left.  r_median samples, sorts the sample, and filters the
rest through buckets of pivots around the sample median before recursing on
the centre.  det_select reduces any rank to a median by padding with free
dummy elements.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import PaddedOracle, ValueOracle, less, less_many
from .errors import EmptyInput, RankOutOfRange
from .networks import ExactSort, RandomMatching, execute, network_sort, random_matching_network

BASE_SIZE = 16


def _lower_median(sorted_ids):
    return sorted_ids[(len(sorted_ids) - 1) // 2]


@dataclass
class CascadeRound:
    """Diagnostics of one round of det_median."""
    size: int
    k: int
    stage_sizes: list
    pivots: int
    marked_left: int
    marked_right: int
    discarded: int


class _Halver:
    def __init__(self, variant):
        self.variant = variant
        if isinstance(variant, RandomMatching):
            self.rng = np.random.default_rng(variant.seed)

    def __call__(self, ids, oracle, ledger):
        if isinstance(self.variant, ExactSort):
            return network_sort(ids, oracle, ledger)
        net = random_matching_network(len(ids), self.variant.rounds, self.rng)
        return list(execute(net, oracle, ledger, ids))


def _cascade(first, halve, k, start_left, oracle, ledger, sizes):
    """k-1 further halving steps, alternating which half is kept."""
    T = first
    take_left = start_left
    sizes.append(len(T))
    for _ in range(k - 1):
        out = halve(T, oracle, ledger)
        h = (len(out) + 1) // 2
        T = out[:h] if take_left else out[len(out) - h:]
        take_left = not take_left
        sizes.append(len(T))
    return T


def _middle_half(sorted_ids):
    m = len(sorted_ids)
    size = (m + 1) // 2
    start = (m - size) // 2
    return sorted_ids[start:start + size]


def det_median(X, oracle, ledger, halver=ExactSort(), trace=None):
    """Lower median of X, deterministically.

    Each round halves the current set S once, then follows two mirrored
    cascades of k = 2*floor(loglog|S|/2) halvings towards ranks near 2/3 and
    1/3.  The middle halves of the sorted cascade ends act as pivots: an
    element above a right pivot is marked R, one below a left pivot is marked
    L, and equally many L and R elements are discarded.  Cascade ends are set
    aside.  Rounds stop once |S| <= n/log n; the set-asides and survivors are
    then sorted and their median returned.
    """
    X = [int(x) for x in X]
    N = len(X)
    if N == 0:
        raise EmptyInput("empty input")
    if N <= BASE_SIZE:
        return _lower_median(network_sort(X, oracle, ledger))
    halve = _Halver(halver)
    limit = N / math.log2(N)
    S = X
    aside = []
    while len(S) > limit:
        m = len(S)
        k = 2 * int(math.floor(math.log2(math.log2(m)) / 2))
        if k < 2:
            break
        out = halve(S, oracle, ledger)
        sizes = []
        right = _cascade(out[m // 2:], halve, k, True, oracle, ledger, sizes)
        left = _cascade(out[:m // 2], halve, k, False, oracle, ledger, sizes)
        RP = _middle_half(network_sort(right, oracle, ledger))
        LP = _middle_half(network_sort(left, oracle, ledger))
        held = set(right) | set(left)
        cand = np.array([y for y in S if y not in held], dtype=np.int64)
        if len(cand) == 0 or not RP or not LP:
            aside.extend(right)
            aside.extend(left)
            S = cand.tolist()
            continue
        # spread comparisons evenly: pivot p handles at most ceil(|cand|/|RP|) elements
        idx = np.arange(len(cand))
        rp = np.asarray(RP, dtype=np.int64)[idx % len(RP)]
        lp = np.asarray(LP, dtype=np.int64)[idx % len(LP)]
        mark_r = less_many(oracle, ledger, rp, cand)
        mark_l = less_many(oracle, ledger, cand, lp)
        both = mark_r & mark_l
        mark_r &= ~both
        mark_l &= ~both
        rpos = np.nonzero(mark_r)[0]
        lpos = np.nonzero(mark_l)[0]
        d = min(len(rpos), len(lpos))
        drop = np.zeros(len(cand), dtype=bool)
        drop[rpos[:d]] = True
        drop[lpos[:d]] = True
        if trace is not None:
            trace.append(CascadeRound(m, k, sizes, len(RP), len(lpos), len(rpos), 2 * d))
        aside.extend(right)
        aside.extend(left)
        S = cand[~drop].tolist()
    F = aside + S
    return _lower_median(network_sort(F, oracle, ledger))


def det_select(X, t, oracle, ledger, halver=ExactSort()):
    """Rank-t element (1-based) of X via det_median on a padded input.

    Dummies go below every real element when the target sits in the lower
    half and above otherwise, so the target becomes the padded median.
    Dummy comparisons cost nothing.
    """
    X = [int(x) for x in X]
    n = len(X)
    if not 1 <= t <= n:
        raise RankOutOfRange(f"rank {t} outside 1..{n}")
    pad = n + 1 - 2 * min(t, n + 1 - t)
    if pad == 0:
        return det_median(X, oracle, ledger, halver)
    side = "low" if t <= n + 1 - t else "high"
    padded = PaddedOracle(oracle, ledger.n, pad, side)
    dummies = list(range(ledger.n, ledger.n + pad))
    return det_median(X + dummies, padded, ledger, halver)


@dataclass(frozen=True)
class SelectionParams:
    k_fn: Callable
    d_fn: Callable
    name: str = "custom"


LOGLOG = SelectionParams(lambda n: n ** (2 / 3), lambda n: n ** (1 / 12), "loglog")
SUBLOG = SelectionParams(lambda n: n / math.log2(n), lambda n: math.log2(n), "sublog")
PRESETS = {"loglog": LOGLOG, "sublog": SUBLOG}


class _Bucket:
    """Pivots of one bucket, handed out least-loaded first.

    A chosen pivot serves `window` consecutive comparisons before the heap is
    consulted again.  Loads count comparisons absorbed in this bucket.
    """

    def __init__(self, pivots, window):
        self.load = {p: 0 for p in pivots}
        self.heap = [(0, i, p) for i, p in enumerate(pivots)]
        self.seq = len(pivots)
        self.marked = set()
        self.window = window
        self.cur = None
        self.left = 0
        self.initial = len(pivots)
        self.absorbed = 0

    def pick(self):
        if self.cur is None or self.left == 0:
            if self.cur is not None:
                heapq.heappush(self.heap, (self.load[self.cur], self.seq, self.cur))
                self.seq += 1
            self.cur = heapq.heappop(self.heap)[2]
            self.left = self.window
        self.left -= 1
        self.load[self.cur] += 1
        self.absorbed += 1
        return self.cur

    def add(self, x):
        self.load[x] = 0
        self.marked.add(x)
        heapq.heappush(self.heap, (0, self.seq, x))
        self.seq += 1

    def __bool__(self):
        return bool(self.load)


@dataclass
class RMedianLevel:
    """Diagnostics of one level of r_median."""
    n: int
    k: int = 0
    b: int = 0
    center: int = 0
    left: int = 0
    right: int = 0
    outcome: str = ""
    buckets: list = field(default_factory=list)


def _comparer(oracle, ledger):
    """Scalar less-than for the probing loop, plus a flush to apply deferred counts.

    Plain value oracles without an event log get a pure-Python path that
    charges a local tally; the comparisons are the same either way.
    """
    if type(oracle) is ValueOracle and ledger.events is None and oracle.values.ndim == 1:
        vals = oracle.values.tolist()
        tally = {}
        work = [0]

        def lt(i, j):
            tally[i] = tally.get(i, 0) + 1
            tally[j] = tally.get(j, 0) + 1
            work[0] += 1
            a, b = vals[i], vals[j]
            return a < b or (a == b and i < j)

        def flush():
            if tally:
                keys = np.fromiter(tally.keys(), dtype=np.int64, count=len(tally))
                ledger.counts[keys] += np.fromiter(tally.values(), dtype=np.int64, count=len(tally))
                ledger.work += work[0]
            tally.clear()
            work[0] = 0

        return lt, flush

    def lt(i, j):
        return less(oracle, ledger, i, j)

    return lt, lambda: None


def r_median(X, params=LOGLOG, oracle=None, ledger=None, rng=None, trace=None, halver=ExactSort()):
    """Lower median of X by sampling and bucket filtering (always correct).

    Falls back to det_median when the filtered partition is too unbalanced,
    or when the centre's median turns out not to lie between the extreme
    sample elements of the centre, which is the condition under which
    discarding the outer buckets is safe.
    """
    if isinstance(params, str):
        params = PRESETS[params]
    X = [int(x) for x in X]
    if not X:
        raise EmptyInput("empty input")
    if rng is None:
        rng = np.random.default_rng()
    return _r_median(X, params, oracle, ledger, rng, len(X), trace, halver)


def _r_median(X, params, oracle, ledger, rng, N, trace, halver):
    n = len(X)
    level = RMedianLevel(n)
    if trace is not None:
        trace.append(level)
    if n <= 2 or n < math.log2(N) ** 4:
        level.outcome = "base"
        return _lower_median(network_sort(X, oracle, ledger))
    k = min(n, int(math.ceil(params.k_fn(n))))
    d = max(2.0, params.d_fn(n))
    window = int(math.ceil(d))
    lg = math.log2(n)
    h = k // 2
    n0 = int(math.ceil(2 * math.sqrt(k * lg)))
    sizes = [n0, int(math.ceil(3 * math.sqrt(k * lg)))]
    while sizes[-1] < h:
        sizes.append(int(math.ceil(d * sizes[-1])))
    level.k = k
    if h - n0 < 1 or h + n0 >= k:
        level.outcome = "degenerate"
        return _lower_median(network_sort(X, oracle, ledger))
    b = 1
    while b + 1 < len(sizes) and sizes[b + 1] <= k / 4:
        b += 1
    b = max(b, 2)
    level.b = b

    order = rng.permutation(n)
    pick = np.zeros(n, dtype=bool)
    pick[order[:k]] = True
    Xa = np.asarray(X, dtype=np.int64)
    S = network_sort(Xa[order[:k]].tolist(), oracle, ledger)
    rest = Xa[order[k:]].tolist()

    def bound(i):
        return sizes[i] if i < len(sizes) else sizes[-1]

    # bucket i holds sample slots [h - n_i, h - n_{i-1}); the outermost takes everything left over
    Lsets = {i: S[max(0, h - bound(i)):max(0, h - bound(i - 1))] for i in range(1, b)}
    Rsets = {i: S[min(k, h + bound(i - 1)):min(k, h + bound(i))] for i in range(1, b)}
    Lsets[b] = S[:max(0, h - bound(b - 1))]
    Rsets[b] = S[min(k, h + bound(b - 1)):]
    center = S[h - n0:h + n0]
    lo_bound, hi_bound = center[0], center[-1]
    if not Lsets[1] or not Rsets[1]:
        level.outcome = "degenerate"
        return _lower_median(network_sort(X, oracle, ledger))
    Lb = {i: _Bucket(Lsets[i], window) for i in range(1, b)}
    Rb = {i: _Bucket(Rsets[i], window) for i in range(1, b)}
    Lm = {i: list(Lsets[i]) for i in range(1, b + 1)}
    Rm = {i: list(Rsets[i]) for i in range(1, b + 1)}
    C = list(center)

    lt, flush = _comparer(oracle, ledger)
    for x in rest:
        for j in range(b - 1, 0, -1):
            bucket = Lb[j]
            p = bucket.pick()
            c = 1 if p in bucket.marked else 2
            if lt(x, p):
                if j < b - c:
                    Lb[j + c].add(x)
                    Lm[j + c].append(x)
                else:
                    Lm[b].append(x)
                break
            bucket = Rb[j]
            p = bucket.pick()
            c = 1 if p in bucket.marked else 2
            if lt(p, x):
                if j < b - c:
                    Rb[j + c].add(x)
                    Rm[j + c].append(x)
                else:
                    Rm[b].append(x)
                break
        else:
            C.append(x)
    flush()

    sum_l = sum(len(v) for v in Lm.values())
    sum_r = sum(len(v) for v in Rm.values())
    level.center, level.left, level.right = len(C), sum_l, sum_r
    for side, buckets in (("L", Lb), ("R", Rb)):
        for i, bk in buckets.items():
            level.buckets.append((side, i, bk.initial, bk.absorbed, max(bk.load.values()), window))
    if max(sum_l, sum_r) > n / 2:
        level.outcome = "fallback-imbalanced"
        return det_median(X, oracle, ledger, halver)

    jbal = sum_l - sum_r
    pool = Lm if jbal > 0 else Rm
    need = abs(jbal)
    for i in range(1, b + 1):
        if need == 0:
            break
        take = pool[i][:need]
        C.extend(take)
        need -= len(take)

    if len(C) < math.log2(N) ** 4 or len(C) >= n:
        level.outcome = "sorted-center"
        Cs = network_sort(C, oracle, ledger)
        med = _lower_median(Cs)
        pos = {e: r for r, e in enumerate(Cs)}
        ok = pos[lo_bound] <= pos[med] <= pos[hi_bound]
    else:
        level.outcome = "recurse"
        med = _r_median(C, params, oracle, ledger, rng, N, trace, halver)
        ok = (med == lo_bound or less(oracle, ledger, lo_bound, med)) and \
             (med == hi_bound or less(oracle, ledger, med, hi_bound))
    if not ok:
        level.outcome = "fallback-bounds"
        return det_median(X, oracle, ledger, halver)
    return med
