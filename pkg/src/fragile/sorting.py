"""Mergesort with linear or exponential merging, and Floyd's heap construction."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import ValueOracle, less
from . import _kernels

EXP_MERGE_CAP = 4


class MergeVariant(str, enum.Enum):
    LINEAR = "linear"
    EXPONENTIAL = "exp"


def _variant(v) -> MergeVariant:
    return v if isinstance(v, MergeVariant) else MergeVariant(v)


def _linear_merge(A, B, oracle, ledger):
    out = []
    i = j = 0
    while i < len(A) and j < len(B):
        if less(oracle, ledger, B[j], A[i]):
            out.append(B[j])
            j += 1
        else:
            out.append(A[i])
            i += 1
    out.extend(A[i:])
    out.extend(B[j:])
    return out


def _exp_merge(A, B, oracle, ledger):
    """Exponential merging.

    The head x of A is located in B by doubling (b_1, b_2, b_4, ...) and then
    binary search between the last two probes.  Positions past the end of B
    act as +infinity sentinels and are never compared.  x and the B elements
    below it are emitted, then the roles of A and B swap.
    """
    A, B = list(A), list(B)
    out = []
    ia = ib = 0
    local = {}

    def lt(x, y):
        local[x] = local.get(x, 0) + 1
        local[y] = local.get(y, 0) + 1
        return less(oracle, ledger, x, y)

    while ia < len(A) and ib < len(B):
        x = A[ia]
        m = len(B) - ib
        prev, pos = 0, 1
        while pos <= m and not lt(x, B[ib + pos - 1]):
            prev, pos = pos, pos * 2
        lo, hi = prev, min(pos, m + 1)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if lt(x, B[ib + mid - 1]):
                hi = mid
            else:
                lo = mid
        out.extend(B[ib:ib + lo])
        out.append(x)
        ia, ib = ia + 1, ib + lo
        A, B, ia, ib = B, A, ib, ia
    out.extend(A[ia:])
    out.extend(B[ib:])
    size = len(out)
    if local and max(local.values()) > EXP_MERGE_CAP * math.log2(size):
        raise AssertionError(f"exponential merge exceeded {EXP_MERGE_CAP}*log2({size}) on one element")
    return out


def merge(A, B, variant, oracle, ledger):
    """Merge two id sequences that are each sorted under the oracle."""
    if _variant(variant) is MergeVariant.LINEAR:
        return _linear_merge(list(A), list(B), oracle, ledger)
    return _exp_merge(A, B, oracle, ledger)


@lru_cache(maxsize=32)
def merge_schedule(n):
    """(lo, mid, hi) of every merge of top-down mergesort, in execution order."""
    out = []
    stack = [(0, n, False)]
    while stack:
        lo, hi, done = stack.pop()
        if hi - lo <= 1:
            continue
        mid = lo + (hi - lo + 1) // 2
        if done:
            out.append((lo, mid, hi))
        else:
            stack.append((lo, hi, True))
            stack.append((mid, hi, False))
            stack.append((lo, mid, False))
    return np.array(out, dtype=np.int64).reshape(-1, 3)


def _fast_path_ok(oracle, ledger):
    return (type(oracle) is ValueOracle and ledger.events is None
            and oracle.values.dtype.kind in "iuf" and oracle.values.ndim == 1)


def mergesort(X, variant, oracle, ledger, fast=True):
    """Top-down mergesort; the left part gets the ceiling of n/2.

    With a plain value oracle and no event log, a compiled kernel performs the
    identical comparison sequence; `fast=False` forces the generic path.
    """
    variant = _variant(variant)
    X = [int(x) for x in X]
    if len(X) <= 1:
        return X
    if fast and _fast_path_ok(oracle, ledger):
        ids = np.array(X, dtype=np.int64)
        work = _kernels.mergesort(oracle.values, ids, merge_schedule(len(ids)),
                                  variant is MergeVariant.EXPONENTIAL, ledger.counts, EXP_MERGE_CAP)
        if work < 0:
            raise AssertionError(f"exponential merge exceeded {EXP_MERGE_CAP}*log2(size) on one element")
        ledger.work += int(work)
        return ids.tolist()
    return _mergesort(X, variant, oracle, ledger)


def _mergesort(X, variant, oracle, ledger):
    if len(X) <= 1:
        return X
    mid = (len(X) + 1) // 2
    return merge(_mergesort(X[:mid], variant, oracle, ledger),
                 _mergesort(X[mid:], variant, oracle, ledger), variant, oracle, ledger)


def worst_case_linear_input(n):
    """Values (n, 1, 2, ..., n-1): the largest element is dragged through every merge."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return [n] + list(range(1, n))


@dataclass
class HeapArray:
    slots: list

    def __len__(self):
        return len(self.slots)

    def __getitem__(self, i):
        return self.slots[i]

    def is_valid(self, values):
        s = self.slots
        return all(values[s[(i - 1) // 2]] <= values[s[i]] for i in range(1, len(s)))


def floyd_heapify(X, oracle, ledger) -> HeapArray:
    """Bottom-up min-heap construction.

    Each sift-down step compares the two children, then the parent with the
    smaller child, swapping when the child is smaller.
    """
    h = [int(x) for x in X]
    n = len(h)
    for i in range(n // 2 - 1, -1, -1):
        j = i
        while True:
            c = 2 * j + 1
            if c >= n:
                break
            if c + 1 < n and less(oracle, ledger, h[c + 1], h[c]):
                c += 1
            if less(oracle, ledger, h[c], h[j]):
                h[c], h[j] = h[j], h[c]
                j = c
            else:
                break
    return HeapArray(h)
