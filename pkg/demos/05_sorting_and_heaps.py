"""Mergesort and heap construction, measured per element.

Linear merging is fine on random inputs but one bad input drags a single
element through every merge.  Exponential (galloping) merging caps that.
Bottom-up heap construction touches each element a logarithmic number of
times and does fewer than 2n comparisons overall.
"""

import math

import numpy as np

from fragile import ValueOracle, floyd_heapify, fragile_summary, mergesort, new_ledger, worst_case_linear_input

for k in (8, 10, 12, 14):
    n = 2 ** k
    worst = np.array(worst_case_linear_input(n))
    rand = np.random.default_rng(k).permutation(n)
    cells = []
    for name, vals in (("worst", worst), ("random", rand)):
        for variant in ("linear", "exp"):
            led = new_ledger(n)
            mergesort(range(n), variant, ValueOracle(vals), led)
            cells.append(f"{name}/{variant} {fragile_summary(led).f_max:>5}")
    print(f"n=2^{k:<2} f_max: " + "  ".join(cells) + f"   (4 log2^2 n = {4 * k * k})")

print()
for k in (6, 10, 14, 16):
    n = 2 ** k
    vals = np.random.default_rng(k).permutation(n)
    led = new_ledger(n)
    heap = floyd_heapify(range(n), ValueOracle(vals), led)
    assert heap.is_valid(vals)
    print(f"heapify n=2^{k:<2}: f_max {led.counts.max():>2} (3 log2 n = {3 * math.log2(n):.0f}), "
          f"work {led.work} = {led.work / n:.3f} n")
