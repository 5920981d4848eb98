"""Minimum finding: tournament, sample-based minimum and the Δ-ary tree of sample minima.

All three share one batched engine that works on a matrix of rows, each row
an independent instance padded with -1.  A single call is just one row; the
tree runs every node of a level as one batch.  Within a batch, comparisons
are issued row by row in array order, so adversarial oracles still see a
deterministic sequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .core import ValueOracle, less_many
from .errors import EmptyInput, IdenticalIds, OutOfRange

BASE_SIZE = 8


@dataclass(frozen=True)
class MinResult:
    minimum: int
    second: Optional[int] = None


@dataclass(frozen=True)
class TreeParams:
    delta: int

    def __post_init__(self):
        if self.delta < 2:
            raise ValueError("tree degree must be at least 2")


def _compiled_ok(oracle, ledger):
    # plain values and no event log: comparisons need not be issued one by one
    return (type(oracle) is ValueOracle and ledger.events is None
            and oracle.values.ndim == 1 and oracle.values.dtype.kind in "iuf")


def _input(X, oracle, ledger):
    X = np.asarray(X, dtype=np.int64).ravel()
    if len(X) == 0:
        raise EmptyInput("empty input")
    if len(X) > 1 and _compiled_ok(oracle, ledger):
        # the compiled kernels trust their ids, so check them up front
        if X.min() < 0 or X.max() >= min(ledger.n, len(oracle.values)):
            raise OutOfRange(f"ids outside ledger of size {ledger.n}")
        if np.bincount(X).max() > 1:
            raise IdenticalIds("element compared with itself")
    return X


def _as_rows(X, oracle, ledger):
    X = _input(X, oracle, ledger)
    return X[None, :], np.array([len(X)], dtype=np.int64)


def _pack(rows, vals, G):
    """Ragged rows from (row index, value) pairs listed in row-major order."""
    sizes = np.bincount(rows, minlength=G).astype(np.int64)
    w = int(sizes.max()) if G else 0
    M = np.full((G, max(w, 1)), -1, dtype=np.int64)
    if len(rows):
        start = np.concatenate([[0], np.cumsum(sizes)[:-1]])
        M[rows, np.arange(len(rows)) - start[rows]] = vals
    return M, sizes


def _tournament_rows(M, sizes, oracle, ledger, second=True):
    """Balanced knockout per row; the last element of an odd round gets a bye.

    Returns (winner, runner-up) arrays, -1 where absent.  The runner-up is
    found by a playoff among the opponents the winner beat.
    """
    if _compiled_ok(oracle, ledger):
        first, runner, work = _kernels.tournament_rows(oracle.values, M, sizes, ledger.counts, second)
        ledger.work += int(work)
        return first, runner
    G, w = M.shape
    # pad to a power of two once; rows stay left-packed, so b == -1 marks a bye
    W = 1 << max(w - 1, 0).bit_length()
    cur = np.full((G, W), -1, np.int64)
    cur[:, :w] = M
    cur[np.arange(W)[None, :] >= sizes[:, None]] = -1
    col = np.broadcast_to(np.arange(W), (G, W)).copy()
    losers = []
    while cur.shape[1] > 1:
        a, b = cur[:, 0::2], cur[:, 1::2]
        paired = b >= 0
        lt = np.ones(a.shape, bool)
        if paired.all():
            lt = less_many(oracle, ledger, a.ravel(), b.ravel()).reshape(a.shape)
        elif paired.any():
            lt[paired] = less_many(oracle, ledger, a[paired], b[paired])
        losers.append(np.where(lt, b, a))
        cur, col = np.where(lt, a, b), np.where(lt, col[:, 0::2], col[:, 1::2])
    first = np.where(sizes > 0, cur[:, 0], -1)
    runner = np.full(G, -1, np.int64)
    if second and losers:
        c = col[:, 0]
        g = np.arange(G)
        opp = np.stack([losers[r][g, np.where(c >= 0, c, 0) >> (r + 1)] for r in range(len(losers))], axis=1)
        opp[sizes <= 1] = -1
        rows, cols = np.nonzero(opp >= 0)
        if len(rows):
            P, psz = _pack(rows, opp[rows, cols], G)
            runner = _tournament_rows(P, psz, oracle, ledger, second=False)[0]
    return first, runner


def _pair_merge(p1, p2, q1, q2, oracle, ledger):
    """Two smallest of {p1, p2, q1, q2} given p1 < p2 and q1 < q2 (-1 = absent).

    This is a four-element tournament whose first round is already decided,
    so the overall winner takes part in exactly one comparison.
    """
    f, s = p1.copy(), p2.copy()
    only_q = p1 < 0
    f[only_q], s[only_q] = q1[only_q], q2[only_q]
    both = (p1 >= 0) & (q1 >= 0)
    if not both.any():
        return f, s
    idx = np.nonzero(both)[0]
    lt = less_many(oracle, ledger, p1[idx], q1[idx])
    f[idx] = np.where(lt, p1[idx], q1[idx])
    # runner-up: the loser of the final against the winner's partner
    loser = np.where(lt, q1[idx], p1[idx])
    partner = np.where(lt, p2[idx], q2[idx])
    s[idx] = loser
    has = partner >= 0
    if has.any():
        j = idx[has]
        lt2 = less_many(oracle, ledger, partner[has], loser[has])
        s[j] = np.where(lt2, partner[has], loser[has])
    return f, s


def _floor_two_thirds(s):
    """floor(s^(2/3)) computed exactly on integers."""
    b = np.floor(np.power(s.astype(np.float64), 2.0 / 3.0)).astype(np.int64)
    s2 = s * s
    b = np.where(b ** 3 > s2, b - 1, b)
    b = np.where((b + 1) ** 3 <= s2, b + 1, b)
    return b


def _shuffle_rows(M, sizes, rng):
    """Uniformly permute the valid prefix of every row (padding stays at the end)."""
    G, w = M.shape
    if G == 1:
        s = int(sizes[0])
        out = M.copy()
        out[0, :s] = M[0, rng.permutation(s)]
        return out
    keys = rng.random((G, w))
    keys[np.arange(w)[None, :] >= sizes[:, None]] = 2.0
    return np.take_along_axis(M, np.argsort(keys, axis=1), axis=1)


def _filter_below(M, lo, hi, thr, oracle, ledger):
    """Per row, the elements in columns [lo, hi) that are smaller than thr."""
    G, w = M.shape
    if _compiled_ok(oracle, ledger):
        out, sizes, work = _kernels.filter_below(oracle.values, M, lo, hi, thr, ledger.counts)
        ledger.work += int(work)
        return out[:, :max(int(sizes.max(initial=0)), 1)], sizes
    cols = np.arange(w)[None, :]
    rows, c = np.nonzero((cols >= lo[:, None]) & (cols < hi[:, None]))
    x = M[rows, c]
    keep = less_many(oracle, ledger, x, thr[rows])
    return _pack(rows[keep], x[keep], G)


def _sample_min_rows(M, sizes, oracle, ledger, rng):
    G = len(sizes)
    r1 = np.full(G, -1, np.int64)
    r2 = np.full(G, -1, np.int64)
    if G == 0:
        return r1, r2
    small = sizes <= BASE_SIZE
    if small.any():
        sub = M[small][:, :min(BASE_SIZE, M.shape[1])]
        r1[small], r2[small] = _tournament_rows(sub, sizes[small], oracle, ledger)
    big = ~small
    if not big.any():
        return r1, r2
    X = _shuffle_rows(M[big], sizes[big], rng)
    s = sizes[big]
    a = (s + 1) // 2
    b = _floor_two_thirds(s)
    # the shuffled prefix of length a is the sample A, its prefix of length b is B
    Bm = X[:, :int(b.max())].copy()
    Bm[np.arange(Bm.shape[1])[None, :] >= b[:, None]] = -1
    b1, b2 = _sample_min_rows(Bm, b, oracle, ledger, rng)
    thr = np.where(b2 >= 0, b2, b1)
    D, dsz = _filter_below(X, b, a, thr, oracle, ledger)
    d1, d2 = _sample_min_rows(D, dsz, oracle, ledger, rng)
    a1, a2 = _pair_merge(d1, d2, b1, b2, oracle, ledger)
    thr = np.where(a2 >= 0, a2, a1)
    C, csz = _filter_below(X, a, s, thr, oracle, ledger)
    c1, c2 = _tournament_rows(C, csz, oracle, ledger)
    r1[big], r2[big] = _pair_merge(a1, a2, c1, c2, oracle, ledger)
    return r1, r2


def _result(m1, m2):
    m1, m2 = int(m1[0]), int(m2[0])
    return MinResult(m1, m2 if m2 >= 0 else None)


def tournament_minimum(X, oracle, ledger) -> MinResult:
    """Minimum and runner-up by a balanced knockout tournament."""
    M, sizes = _as_rows(X, oracle, ledger)
    return _result(*_tournament_rows(M, sizes, oracle, ledger))


def sample_minimum(X, oracle, ledger, rng) -> MinResult:
    """Randomised minimum and runner-up; the minimum has O(1) expected comparisons."""
    M, sizes = _as_rows(X, oracle, ledger)
    return _result(*_sample_min_rows(M, sizes, oracle, ledger, rng))


def tree_minimum(X, params, oracle, ledger, rng) -> int:
    """Minimum via a fixed Δ-ary tree whose nodes each run sample_minimum.

    Leaves are X in the given order; children are grouped left to right, so
    only the last node of a level can have fewer than Δ children.
    """
    delta = params.delta if isinstance(params, TreeParams) else TreeParams(int(params)).delta
    cur = _input(X, oracle, ledger)
    while len(cur) > 1:
        m = len(cur)
        G = -(-m // delta)
        M = np.full(G * delta, -1, np.int64)
        M[:m] = cur
        M = M.reshape(G, delta)
        sizes = np.full(G, delta, np.int64)
        sizes[-1] = m - (G - 1) * delta
        cur = _sample_min_rows(M, sizes, oracle, ledger, rng)[0]
    return int(cur[0])
