"""Adaptive adversaries that force many comparisons onto a single element.

Each adversary is an Oracle: plug it into any algorithm in the package.  They
keep their own record of answers so a run can be certified afterwards.
"""

from __future__ import annotations

import heapq
from collections import deque


from .core import Oracle, Outcome
from .errors import (
    InconsistentClaim,
    MultipleSinks,
    UnsupportedAccessPattern,
)


class MinAdversary(Oracle):
    """Adversary for minimum finding.

    Answers build a digraph where u -> v means v was declared smaller.  A
    sink is an element never declared larger.  Between two sinks the one
    with more comparisons wins (tie: smaller id) and the edge is red; a sink
    always beats a non-sink; two non-sinks follow the existing order, or the
    smaller id when incomparable.  r_i counts the nodes that reach i along
    red edges, including i, and stays at most 2^{d_i} for every sink.
    """

    mode = "adversarial"

    def __init__(self, n: int, check_invariants: bool = False):
        self.n = n
        self.out_edges = [[] for _ in range(n)]
        self.red_in = [[] for _ in range(n)]
        self.indegree = [0] * n
        self.red_reach = [1] * n
        self.history = []
        self.check_invariants = check_invariants

    def is_sink(self, i):
        return not self.out_edges[i]

    def reaches(self, u, v):
        """Is there a directed path u -> ... -> v (so v is known smaller than u)?"""
        if u == v:
            return True
        seen = {u}
        q = deque([u])
        while q:
            x = q.popleft()
            for y in self.out_edges[x]:
                if y == v:
                    return True
                if y not in seen:
                    seen.add(y)
                    q.append(y)
        return False

    def _declare(self, small, large, red):
        self.out_edges[large].append(small)
        self.indegree[small] += 1
        if red:
            self.red_in[small].append(large)
            self.red_reach[small] += self.red_reach[large]

    def outcome(self, i, j):
        si, sj = self.is_sink(i), self.is_sink(j)
        if si and sj:
            di, dj = self.indegree[i], self.indegree[j]
            i_small = di > dj or (di == dj and i < j)
            red = True
        elif si or sj:
            i_small = si
            red = False
        else:
            if self.reaches(j, i):
                i_small = True
            elif self.reaches(i, j):
                i_small = False
            else:
                i_small = i < j
            red = False
        if i_small:
            self._declare(i, j, red)
        else:
            self._declare(j, i, red)
        ans = Outcome.LESS if i_small else Outcome.GREATER
        self.history.append((i, j, ans))
        if self.check_invariants:
            self.assert_invariants()
        return ans

    def sinks(self):
        return [i for i in range(self.n) if self.is_sink(i)]

    def red_reach_bfs(self, i):
        """r_i recomputed from scratch over red edges."""
        seen = {i}
        q = deque([i])
        while q:
            x = q.popleft()
            for y in self.red_in[x]:
                if y not in seen:
                    seen.add(y)
                    q.append(y)
        return len(seen)

    def assert_invariants(self):
        for i in self.sinks():
            if self.red_reach[i] > 2 ** self.indegree[i]:
                raise AssertionError(f"r_{i} = {self.red_reach[i]} exceeds 2^{self.indegree[i]}")

    def certify(self, claimed_min):
        return min_adversary_certify(self, claimed_min)


def min_adversary_answer(state: MinAdversary, i, j) -> Outcome:
    return state.outcome(i, j)


def _linear_extension(n, out_edges):
    """Smallest-first order: v precedes u for every edge u -> v; ties by id."""
    indeg = [0] * n  # number of elements that must come before each node
    preds = [[] for _ in range(n)]
    for u in range(n):
        for v in out_edges[u]:
            indeg[u] += 1
            preds[v].append(u)
    ready = [i for i in range(n) if indeg[i] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        v = heapq.heappop(ready)
        order.append(v)
        for u in preds[v]:
            indeg[u] -= 1
            if indeg[u] == 0:
                heapq.heappush(ready, u)
    if len(order) != n:
        raise AssertionError("answers contain a cycle")
    return order


def min_adversary_certify(state: MinAdversary, claimed_min):
    """Total order consistent with every answer, provided the claim is proven."""
    sinks = state.sinks()
    if claimed_min not in sinks:
        raise InconsistentClaim(f"{claimed_min} was declared larger than some element")
    if len(sinks) > 1:
        raise MultipleSinks(f"{len(sinks)} elements were never declared larger: {sinks[:8]}")
    return _linear_extension(state.n, state.out_edges)


def replay_consistent(history, order) -> bool:
    """Do all recorded answers agree with the given smallest-first order?"""
    rank = {x: r for r, x in enumerate(order)}
    for i, j, ans in history:
        if (rank[i] < rank[j]) != (ans < 0):
            return False
    return True


class _Interval:
    """Scapegoat x must be placed among `other` (sorted): its insertion slot lies in [lo, hi]."""

    def __init__(self, size):
        self.lo, self.hi = 0, size

    def answer(self, r):
        """Is x larger than the element at index r of `other`?  Keeps the larger half."""
        greater = self.hi - max(self.lo, r + 1) + 1
        smaller = min(self.hi, r) - self.lo + 1
        if greater >= smaller:
            self.lo = max(self.lo, r + 1)
            return True
        self.hi = min(self.hi, r)
        return False


class ScapegoatAdversary(Oracle):
    """Adversary for merging sorted A and B with a scapegoat x in B.

    B elements before x are below all of A, those after x above all of A;
    comparisons of x with A halve the set of still possible slots for x,
    keeping the larger side.
    """

    mode = "adversarial"

    def __init__(self, A, B, scapegoat=None):
        self.A = list(A)
        self.B = list(B)
        if not self.B:
            raise ValueError("B must be non-empty")
        self.x = self.B[len(self.B) // 2] if scapegoat is None else scapegoat
        self.xpos = self.B.index(self.x)
        self.posA = {a: r for r, a in enumerate(self.A)}
        self.posB = {b: r for r, b in enumerate(self.B)}
        self.interval = _Interval(len(self.A))
        self.history = []

    @property
    def lo(self):
        return self.interval.lo

    @property
    def hi(self):
        return self.interval.hi

    def _i_smaller(self, i, j):
        pA, pB = self.posA, self.posB
        if i in pA and j in pA:
            return pA[i] < pA[j]
        if i in pB and j in pB:
            return pB[i] < pB[j]
        if i in pA:
            return not self._i_smaller(j, i)
        # i in B, j in A
        if i == self.x:
            return not self.interval.answer(pA[j])
        return pB[i] < self.xpos

    def outcome(self, i, j):
        if (i not in self.posA and i not in self.posB) or (j not in self.posA and j not in self.posB):
            raise UnsupportedAccessPattern(f"comparison ({i}, {j}) outside the merge instance")
        ans = Outcome.LESS if self._i_smaller(i, j) else Outcome.GREATER
        self.history.append((i, j, ans))
        return ans

    def certify(self):
        """Smallest-first order consistent with all answers (x at the lowest open slot)."""
        before = self.B[:self.xpos]
        after = self.B[self.xpos + 1:]
        p = self.interval.lo
        return before + self.A[:p] + [self.x] + self.A[p:] + after


def merge_scapegoat_answer(state: ScapegoatAdversary, i, j) -> Outcome:
    return state.outcome(i, j)


class _Node:
    def __init__(self, lo, hi):
        self.lo, self.hi = lo, hi
        self.left = self.right = None
        self.order = None
        self.x = None
        self.started = False
        self.final = False


class MergesortScapegoatAdversary(Oracle):
    """Scapegoat adversary spread over the merge tree of top-down mergesort.

    Element ids 0..n-1 are the input positions.  A comparison between i and
    j belongs to the merge at their lowest common tree node.  At each merge
    the scapegoat of the larger child (left on ties) becomes the node's
    scapegoat and is answered by interval halving against the other child;
    other elements of its child sit entirely below or above the other child.
    A node's merged order is fixed once its parent starts merging.
    """

    mode = "adversarial"

    def __init__(self, n: int):
        if n < 2:
            raise ValueError("n must be at least 2")
        self.n = n
        self.leaf = [None] * n
        self.parent = {}
        self.root = self._build(0, n)
        self.history = []

    def _build(self, lo, hi):
        v = _Node(lo, hi)
        if hi - lo == 1:
            v.order, v.x, v.final = [lo], lo, True
            self.leaf[lo] = v
            return v
        mid = lo + (hi - lo + 1) // 2
        v.left, v.right = self._build(lo, mid), self._build(mid, hi)
        self.parent[id(v.left)] = v
        self.parent[id(v.right)] = v
        return v

    def _lca(self, i, j):
        v = self.root
        while True:
            mid = v.left.hi
            if i < mid and j < mid:
                v = v.left
            elif i >= mid and j >= mid:
                v = v.right
            else:
                return v

    def _finalize(self, v):
        if v.final:
            return
        if not v.started:
            raise UnsupportedAccessPattern(f"merge of [{v.lo}, {v.hi}) never happened")
        P, Q, k = v.big.order, v.other.order, v.xpos
        p = v.interval.lo
        v.order = P[:k] + Q[:p] + [v.x] + Q[p:] + P[k + 1:]
        v.final = True

    def _start(self, v):
        for c in (v.left, v.right):
            self._finalize(c)
        big = v.left if len(v.left.order) >= len(v.right.order) else v.right
        other = v.right if big is v.left else v.left
        v.x = big.x
        v.big, v.other = big, other
        v.xpos = big.order.index(v.x)
        v.rank_big = {e: r for r, e in enumerate(big.order)}
        v.rank_other = {e: r for r, e in enumerate(other.order)}
        v.interval = _Interval(len(other.order))
        v.started = True

    def outcome(self, i, j):
        if i == j or not (0 <= i < self.n and 0 <= j < self.n):
            raise UnsupportedAccessPattern(f"comparison ({i}, {j}) is not between two input positions")
        v = self._lca(i, j)
        if v.final:
            raise UnsupportedAccessPattern(f"merge of [{v.lo}, {v.hi}) was already finished")
        if not v.started:
            self._start(v)
        ans = Outcome.LESS if self._i_smaller(v, i, j) else Outcome.GREATER
        self.history.append((i, j, ans))
        return ans

    def _i_smaller(self, v, i, j):
        if i in v.rank_other:
            return not self._i_smaller(v, j, i)
        # i in the scapegoat's child, j in the other child
        if i == v.x:
            return not v.interval.answer(v.rank_other[j])
        return v.rank_big[i] < v.xpos

    @property
    def root_scapegoat(self):
        return self.root.x

    def certify(self):
        """Smallest-first order of all positions consistent with every answer."""
        self._finalize_all(self.root)
        return list(self.root.order)

    def _finalize_all(self, v):
        if v.final:
            return
        self._finalize_all(v.left)
        self._finalize_all(v.right)
        if not v.started:
            self._start(v)
        self._finalize(v)


def mergesort_scapegoat_compose(n: int) -> MergesortScapegoatAdversary:
    return MergesortScapegoatAdversary(n)
