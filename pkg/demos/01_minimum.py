"""Finding the minimum: who pays for the comparisons?

A knockout tournament is as cheap as possible in total (n - 1 comparisons),
but the winner plays every round.  Sampling lets the eventual minimum skip
most of the work, at the price of a few elements that absorb many more
comparisons.  A tree of sampling nodes sits between the two.
"""

import math

import numpy as np

from fragile import ValueOracle, fragile_summary, new_ledger, sample_minimum, tournament_minimum, tree_minimum
from fragile.minimum import TreeParams

n = 2 ** 16
rng = np.random.default_rng(1)
values = rng.permutation(n)
target = int(np.argmin(values))


def show(name, run):
    led = new_ledger(n)
    got = run(led)
    s = fragile_summary(led, target)
    assert got == target
    print(f"{name:<22} minimum compared {s.f_target:>4} times, busiest other element {s.f_max_rest:>6}, "
          f"total {s.work}")


print(f"n = {n}, ceil(log2 n) = {math.ceil(math.log2(n))}\n")
show("tournament", lambda led: tournament_minimum(range(n), ValueOracle(values), led).minimum)
show("sample minimum", lambda led: sample_minimum(range(n), ValueOracle(values), led, rng).minimum)
for delta in (4, 16, 256):
    show(f"tree, degree {delta}", lambda led: tree_minimum(range(n), TreeParams(delta), ValueOracle(values), led, rng))

print("\nAveraged over 200 inputs the sampled minimum is touched only a handful of times:")
f = []
for t in range(200):
    r = np.random.default_rng(t)
    v = r.permutation(n)
    led = new_ledger(n)
    m = sample_minimum(range(n), ValueOracle(v), led, r).minimum
    f.append(led.counts[m])
print(f"  mean {np.mean(f):.2f}, worst {max(f)}")
