"""Comparison ledger and oracles.

Every algorithm in the package compares elements only through `compare`,
`less` or `less_many`.  Those functions charge the ledger, so per-element
comparison counts (fragility) and total work are measured the same way for
all of them.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import IdenticalIds, OutOfRange


class Outcome(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


class ComparisonLedger:
    """Per-element comparison counts, total work and an optional event log."""

    def __init__(self, n: int, record_events: bool = False):
        if n < 0:
            raise ValueError("ledger size must be non-negative")
        self.n = int(n)
        self.counts = np.zeros(self.n, dtype=np.int64)
        self.work = 0
        self.events = [] if record_events else None

    def record(self, i: int, j: int):
        self.counts[i] += 1
        self.counts[j] += 1
        self.work += 1
        if self.events is not None:
            self.events.append((int(i), int(j)))

    def record_many(self, a: np.ndarray, b: np.ndarray):
        m = len(a)
        if m == 0:
            return
        # bincount is O(n); only worth it when the batch is a sizeable fraction of n
        ab = np.concatenate([a, b])
        if m * 8 > self.n:
            self.counts += np.bincount(ab, minlength=self.n)
        else:
            np.add.at(self.counts, ab, 1)
        self.work += m
        if self.events is not None:
            self.events.extend(zip(a.tolist(), b.tolist()))

    def copy(self) -> "ComparisonLedger":
        other = ComparisonLedger(self.n, record_events=self.events is not None)
        other.counts = self.counts.copy()
        other.work = self.work
        if self.events is not None:
            other.events = list(self.events)
        return other

    def to_dict(self) -> dict:
        return {"n": self.n, "counts": self.counts.tolist(), "work": int(self.work)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "ComparisonLedger":
        led = cls(d["n"])
        led.counts = np.asarray(d["counts"], dtype=np.int64)
        led.work = int(d["work"])
        return led

    def __repr__(self):
        return f"ComparisonLedger(n={self.n}, work={self.work})"


def new_ledger(n: int, record_events: bool = False) -> ComparisonLedger:
    return ComparisonLedger(n, record_events)


class Oracle:
    """Answers comparisons between element ids.

    Subclasses implement `outcome`.  `outcomes` answers a batch of pairs in
    array order; the default loops, which is what stateful adversaries need.
    Ids for which `is_virtual` holds are dummies whose comparisons are free.
    """

    mode = "value"

    def outcome(self, i: int, j: int) -> Outcome:
        raise NotImplementedError

    def outcomes(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        out = np.empty(len(a), dtype=np.int8)
        for k, (i, j) in enumerate(zip(a.tolist(), b.tolist())):
            out[k] = self.outcome(i, j)
        return out

    def is_virtual(self, i: int) -> bool:
        return False

    def virtual_mask(self, a: np.ndarray) -> Optional[np.ndarray]:
        return None


class ValueOracle(Oracle):
    """Compares the stored values of two ids."""

    mode = "value"

    def __init__(self, values):
        self.values = np.asarray(values)

    def outcome(self, i, j):
        x, y = self.values[i], self.values[j]
        if x < y:
            return Outcome.LESS
        if x > y:
            return Outcome.GREATER
        return Outcome.EQUAL

    def outcomes(self, a, b):
        x, y = self.values[a], self.values[b]
        return (x > y).astype(np.int8) - (x < y).astype(np.int8)

    def less_mask(self, a, b):
        x, y = self.values[a], self.values[b]
        return (x < y) | ((x == y) & (a < b))


class PaddedOracle(Oracle):
    """Wraps an oracle over ids [0, n_real) and adds dummy ids after them.

    Dummies sit below every real element (`side="low"`) or above every real
    element (`side="high"`); dummies are ordered among themselves by id.
    """

    def __init__(self, base: Oracle, n_real: int, n_dummy: int, side: str):
        if side not in ("low", "high"):
            raise ValueError("side must be 'low' or 'high'")
        self.base = base
        self.mode = base.mode
        self.n_real = n_real
        self.n_dummy = n_dummy
        self.side = side

    def is_virtual(self, i):
        return i >= self.n_real

    def virtual_mask(self, a):
        return a >= self.n_real

    def outcome(self, i, j):
        vi, vj = i >= self.n_real, j >= self.n_real
        if not vi and not vj:
            return self.base.outcome(i, j)
        if vi and vj:
            return Outcome.LESS if i < j else Outcome.GREATER
        dummy_low = self.side == "low"
        # exactly one of the two is a dummy
        if vi:
            return Outcome.LESS if dummy_low else Outcome.GREATER
        return Outcome.GREATER if dummy_low else Outcome.LESS

    def outcomes(self, a, b):
        va, vb = a >= self.n_real, b >= self.n_real
        real = ~va & ~vb
        out = np.empty(len(a), dtype=np.int8)
        if real.any():
            out[real] = self.base.outcomes(a[real], b[real])
        both = va & vb
        out[both] = np.where(a[both] < b[both], -1, 1)
        sign = -1 if self.side == "low" else 1
        out[va & ~vb] = sign
        out[~va & vb] = -sign
        return out

    def less_mask(self, a, b):
        o = self.outcomes(a, b)
        return (o < 0) | ((o == 0) & (a < b))


def _check_pair(ledger, i, j):
    if i == j:
        raise IdenticalIds(f"element {i} compared with itself")
    if i < 0 or j < 0 or i >= ledger.n or j >= ledger.n:
        raise OutOfRange(f"ids ({i}, {j}) outside ledger of size {ledger.n}")


def compare(oracle: Oracle, ledger: ComparisonLedger, i: int, j: int) -> Outcome:
    """Ask the oracle about (i, j) and charge both elements one comparison."""
    if oracle.is_virtual(i) or oracle.is_virtual(j):
        if i == j:
            raise IdenticalIds(f"element {i} compared with itself")
        return oracle.outcome(i, j)
    _check_pair(ledger, i, j)
    ledger.record(i, j)
    return oracle.outcome(i, j)


def less(oracle, ledger, i, j) -> bool:
    """True if i precedes j; Equal counts as Less for the smaller id."""
    o = compare(oracle, ledger, i, j)
    return o < 0 or (o == 0 and i < j)


def less_many(oracle, ledger, a, b) -> np.ndarray:
    """Vectorised `less` over aligned id arrays, answered in array order."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if len(a) == 0:
        return np.zeros(0, dtype=bool)
    if np.any(a == b):
        raise IdenticalIds("element compared with itself")
    virt = oracle.virtual_mask(a)
    if virt is None:
        real = None
    else:
        virt = virt | oracle.virtual_mask(b)
        real = ~virt
    ra, rb = (a, b) if real is None else (a[real], b[real])
    if len(ra) and (ra.min() < 0 or rb.min() < 0 or ra.max() >= ledger.n or rb.max() >= ledger.n):
        raise OutOfRange(f"ids outside ledger of size {ledger.n}")
    ledger.record_many(ra, rb)
    if hasattr(oracle, "less_mask"):
        return oracle.less_mask(a, b)
    o = oracle.outcomes(a, b)
    return (o < 0) | ((o == 0) & (a < b))


@dataclass(frozen=True)
class FragileSummary:
    f_target: Optional[int]
    f_max_rest: int
    f_max: int
    work: int


def fragile_summary(ledger: ComparisonLedger, target: Optional[int] = None) -> FragileSummary:
    c = ledger.counts
    f_max = int(c.max()) if len(c) else 0
    if target is None:
        return FragileSummary(None, f_max, f_max, int(ledger.work))
    if target < 0 or target >= ledger.n:
        raise OutOfRange(f"target {target} outside ledger of size {ledger.n}")
    if ledger.n > 1:
        rest = max(int(c[:target].max(initial=0)), int(c[target + 1:].max(initial=0)))
    else:
        rest = 0
    return FragileSummary(int(c[target]), rest, f_max, int(ledger.work))
