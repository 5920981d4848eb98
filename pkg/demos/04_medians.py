"""Median selection with bounded fragility.

The deterministic algorithm repeatedly halves, marks and discards in
cascades, so no element is compared often; the randomized one samples
pivots, spreads the work over buckets of pivots and sorts only a small
centre.  Both always return the exact lower median.
"""

import numpy as np

from fragile import LOGLOG, SUBLOG, ValueOracle, det_median, det_select, fragile_summary, new_ledger, r_median
from fragile.networks import sorting_network

for k in (12, 14, 16, 17):
    n = 2 ** k
    rng = np.random.default_rng(k)
    values = rng.permutation(n)
    med = int(np.argsort(values)[(n - 1) // 2])
    row = [f"n=2^{k}"]
    for name, run in [
        ("det", lambda led: det_median(range(n), ValueOracle(values), led)),
        ("loglog", lambda led: r_median(range(n), LOGLOG, ValueOracle(values), led, rng)),
        ("sublog", lambda led: r_median(range(n), SUBLOG, ValueOracle(values), led, rng)),
    ]:
        led = new_ledger(n)
        assert run(led) == med
        s = fragile_summary(led, med)
        row.append(f"{name}: median {s.f_target:>3} / others {s.f_max_rest:>4} / work/n {s.work / n:5.1f}")
    print("  ".join(row))
    print(f"{'':8}(a plain sorting network: every element {sorting_network(n).size * 2 // n} on average)")

print("\nAny rank: padding with free dummies turns selection into a median problem")
n = 1000
values = np.random.default_rng(0).permutation(n)
for t in (1, 10, 500, 999):
    led = new_ledger(n)
    got = det_select(range(n), t, ValueOracle(values), led)
    print(f"  rank {t:>3}: value {values[got]:>3}, busiest element {led.counts.max()}, total {led.work}")
