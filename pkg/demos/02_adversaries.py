"""Adversaries that decide the input as the algorithm runs.

Each adversary answers comparisons so that one element is forced to take
part in many of them, and afterwards produces a total order consistent with
every answer it gave.  That order is a concrete input on which the algorithm
behaves exactly as it just did.
"""

from fragile import MergesortScapegoatAdversary, MinAdversary, ScapegoatAdversary, new_ledger, tournament_minimum
from fragile.adversaries import replay_consistent
from fragile.sorting import merge, mergesort

print("Minimum finding against the red/black adversary")
for n in (5, 8, 33, 64):
    adv = MinAdversary(n)
    led = new_ledger(n)
    w = tournament_minimum(range(n), adv, led).minimum
    order = adv.certify(w)
    print(f"  n={n:<3} winner compared {led.counts[w]} times, {adv.red_reach[w]} elements behind it; "
          f"answers replay on the certificate: {replay_consistent(adv.history, order)}")

print("\nMerging two sorted lists of length m, one element of the second list is the scapegoat")
for m in (1, 8, 64, 1000):
    A, B = list(range(m)), list(range(m, 2 * m))
    for variant in ("linear", "exp"):
        adv = ScapegoatAdversary(A, B)
        led = new_ledger(2 * m)
        merge(A, B, variant, adv, led)
        print(f"  m={m:<5} {variant:<6} merge: scapegoat compared {led.counts[adv.x]} times")

print("\nTop-down mergesort: the scapegoat of each merge is handed up the tree")
for k in range(3, 11):
    n = 2 ** k
    adv = MergesortScapegoatAdversary(n)
    led = new_ledger(n)
    out = mergesort(range(n), "exp", adv, led)
    assert out == adv.certify()
    print(f"  n=2^{k:<2} exponential merging still pays {led.counts[adv.root_scapegoat]:>3} "
          f"on one element (sum of per-level floors: {k * (k + 1) // 2})")
