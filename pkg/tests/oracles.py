"""Slow, obviously-correct reference implementations used as test oracles."""

import itertools
import math


def key(values):
    return lambda i: (values[i], i)


def sorted_ids(values):
    return sorted(range(len(values)), key=key(values))


def rank_id(values, r):
    return sorted_ids(values)[r]


def run_network(width, comparators, seq):
    """Apply comparators (low, high) in order to a list of comparable items."""
    a = list(seq)
    for lo, hi in comparators:
        if a[hi] < a[lo]:
            a[lo], a[hi] = a[hi], a[lo]
    return a


def sorts_all_zero_one(width, comparators):
    for bits in itertools.product((0, 1), repeat=width):
        out = run_network(width, comparators, bits)
        if out != sorted(out):
            return False
    return True


def depth(width, comparators):
    lvl = [0] * width
    for lo, hi in comparators:
        d = max(lvl[lo], lvl[hi]) + 1
        lvl[lo] = lvl[hi] = d
    return max(lvl, default=0)


def halver_epsilon(width, comparators):
    """max over 0-1 inputs of the misplaced fraction, per the definition."""
    h = width // 2
    worst = 0
    for bits in itertools.product((0, 1), repeat=width):
        out = run_network(width, comparators, bits)
        z = bits.count(0)
        if z <= width / 2:
            worst = max(worst, sum(1 for p in range(h, width) if out[p] == 0))
        if width - z <= width / 2:
            worst = max(worst, sum(1 for p in range(h) if out[p] == 1))
    return worst / width


def knockout_winner_games(values):
    """Games played by the winner of a left-to-right knockout with a bye for the odd one out."""
    games = {i: 0 for i in range(len(values))}
    alive = list(range(len(values)))
    k = key(values)
    while len(alive) > 1:
        nxt = []
        for p in range(0, len(alive) - 1, 2):
            a, b = alive[p], alive[p + 1]
            games[a] += 1
            games[b] += 1
            nxt.append(min(a, b, key=k))
        if len(alive) % 2:
            nxt.append(alive[-1])
        alive = nxt
    return alive[0], games[alive[0]]


def linear_merge_counts(values, A, B):
    counts = {}
    out = []
    A, B = list(A), list(B)
    k = key(values)
    while A and B:
        counts[A[0]] = counts.get(A[0], 0) + 1
        counts[B[0]] = counts.get(B[0], 0) + 1
        out.append(B.pop(0) if k(B[0]) < k(A[0]) else A.pop(0))
    return out + A + B, counts


def heapify_counts(values):
    """Textbook bottom-up heap construction with a comparison tally."""
    h = list(range(len(values)))
    n = len(h)
    counts = [0] * n
    k = key(values)

    def lt(a, b):
        counts[a] += 1
        counts[b] += 1
        return k(a) < k(b)

    def sift(j):
        c = 2 * j + 1
        if c >= n:
            return
        if c + 1 < n and lt(h[c + 1], h[c]):
            c += 1
        if lt(h[c], h[j]):
            h[c], h[j] = h[j], h[c]
            sift(c)

    for i in reversed(range(n // 2)):
        sift(i)
    return h, counts


def is_min_heap(values, slots):
    return all(values[slots[(i - 1) // 2]] <= values[slots[i]] for i in range(1, len(slots)))


def ceil_log2(n):
    return math.ceil(math.log2(n)) if n > 1 else 0
