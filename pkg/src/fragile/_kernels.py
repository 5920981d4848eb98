"""Compiled mergesort for value-backed oracles.

Performs exactly the comparisons of the generic implementation in
sorting.py, in the same order, updating the same counts.  Tests check the
two paths against each other.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _lt(vals, i, j):
    return vals[i] < vals[j] or (vals[i] == vals[j] and i < j)


@njit(cache=True)
def _linear(vals, A, B, out, counts):
    i = 0
    j = 0
    k = 0
    work = 0
    while i < len(A) and j < len(B):
        counts[A[i]] += 1
        counts[B[j]] += 1
        work += 1
        if _lt(vals, B[j], A[i]):
            out[k] = B[j]
            j += 1
        else:
            out[k] = A[i]
            i += 1
        k += 1
    while i < len(A):
        out[k] = A[i]
        i += 1
        k += 1
    while j < len(B):
        out[k] = B[j]
        j += 1
        k += 1
    return work


@njit(cache=True)
def _exp(vals, A, B, out, counts, local, cap):
    # local[id] counts comparisons inside this merge; reset before returning
    ia = 0
    ib = 0
    k = 0
    work = 0
    while ia < len(A) and ib < len(B):
        x = A[ia]
        m = len(B) - ib
        prev = 0
        pos = 1
        while pos <= m:
            y = B[ib + pos - 1]
            counts[x] += 1
            counts[y] += 1
            local[x] += 1
            local[y] += 1
            work += 1
            if _lt(vals, x, y):
                break
            prev = pos
            pos *= 2
        lo = prev
        hi = min(pos, m + 1)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            y = B[ib + mid - 1]
            counts[x] += 1
            counts[y] += 1
            local[x] += 1
            local[y] += 1
            work += 1
            if _lt(vals, x, y):
                hi = mid
            else:
                lo = mid
        for t in range(lo):
            out[k] = B[ib + t]
            k += 1
        out[k] = x
        k += 1
        ia += 1
        ib += lo
        A, B = B, A
        ia, ib = ib, ia
    while ia < len(A):
        out[k] = A[ia]
        ia += 1
        k += 1
    while ib < len(B):
        out[k] = B[ib]
        ib += 1
        k += 1
    limit = cap * math.log2(len(out))
    bad = False
    for t in range(len(out)):
        if local[out[t]] > limit:
            bad = True
        local[out[t]] = 0
    if bad:
        return -1
    return work


@njit(cache=True)
def mergesort(vals, ids, schedule, exponential, counts, cap):
    buf = np.empty_like(ids)
    local = np.zeros(len(counts), dtype=np.int64)
    work = 0
    for s in range(schedule.shape[0]):
        lo = schedule[s, 0]
        mid = schedule[s, 1]
        hi = schedule[s, 2]
        A = ids[lo:mid].copy()
        B = ids[mid:hi].copy()
        out = buf[lo:hi]
        if exponential:
            w = _exp(vals, A, B, out, counts, local, cap)
            if w < 0:
                return -1
        else:
            w = _linear(vals, A, B, out, counts)
        work += w
        ids[lo:hi] = out
    return work


@njit(cache=True)
def run_network(vals, arr, lo, hi, counts):
    # comparators listed layer by layer; within a layer wires are disjoint,
    # so a sequential sweep matches the layered semantics exactly
    for c in range(len(lo)):
        a = lo[c]
        b = hi[c]
        x = arr[a]
        y = arr[b]
        counts[x] += 1
        counts[y] += 1
        if not _lt(vals, x, y):
            arr[a] = y
            arr[b] = x
    return len(lo)


@njit(cache=True)
def _knockout(vals, ids, s, cur, pos, L, counts):
    # balanced knockout over ids[:s]; the last element of an odd round gets a bye.
    # L[r, q] is the loser of pair q in round r (-1 for a bye).  Returns
    # (winner, its original column, rounds played, comparisons).
    for k in range(s):
        cur[k] = ids[k]
        pos[k] = k
    cnt = s
    r = 0
    work = 0
    while cnt > 1:
        half = (cnt + 1) // 2
        for q in range(half):
            if 2 * q + 1 < cnt:
                x = cur[2 * q]
                y = cur[2 * q + 1]
                counts[x] += 1
                counts[y] += 1
                work += 1
                if _lt(vals, x, y):
                    L[r, q] = y
                    pos[q] = pos[2 * q]
                else:
                    L[r, q] = x
                    cur[2 * q] = y
                    pos[q] = pos[2 * q + 1]
                cur[q] = cur[2 * q]
            else:
                L[r, q] = -1
                cur[q] = cur[2 * q]
                pos[q] = pos[2 * q]
        cnt = half
        r += 1
    return cur[0], pos[0], r, work


@njit(cache=True)
def tournament_rows(vals, M, sizes, counts, second):
    """Winner and runner-up of every row, as the batched numpy engine finds them."""
    G, w = M.shape
    first = np.full(G, -1, np.int64)
    runner = np.full(G, -1, np.int64)
    rounds = 1
    while (1 << rounds) < w:
        rounds += 1
    cur = np.empty(w, np.int64)
    pos = np.empty(w, np.int64)
    L = np.empty((rounds, w), np.int64)
    opp = np.empty(rounds, np.int64)
    cur2 = np.empty(rounds, np.int64)
    pos2 = np.empty(rounds, np.int64)
    L2 = np.empty((rounds, rounds), np.int64)
    work = 0
    for g in range(G):
        s = sizes[g]
        if s == 0:
            continue
        win, c, nr, wk = _knockout(vals, M[g], s, cur, pos, L, counts)
        work += wk
        first[g] = win
        if second and s > 1:
            m = 0
            for r in range(nr):
                o = L[r, c >> (r + 1)]
                if o >= 0:
                    opp[m] = o
                    m += 1
            if m > 0:
                w2, c2, nr2, wk2 = _knockout(vals, opp, m, cur2, pos2, L2, counts)
                work += wk2
                runner[g] = w2
    return first, runner, work


@njit(cache=True)
def filter_below(vals, M, lo, hi, thr, counts):
    """Per row, the elements of columns [lo, hi) smaller than thr, packed left."""
    G = M.shape[0]
    sizes = np.zeros(G, np.int64)
    width = 1
    for g in range(G):
        if hi[g] - lo[g] > width:
            width = hi[g] - lo[g]
    out = np.full((G, width), -1, np.int64)
    work = 0
    for g in range(G):
        t = thr[g]
        k = 0
        for j in range(lo[g], hi[g]):
            x = M[g, j]
            counts[x] += 1
            counts[t] += 1
            work += 1
            if _lt(vals, x, t):
                out[g, k] = x
                k += 1
        sizes[g] = k
    return out, sizes, work
