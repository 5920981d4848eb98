"""Comparator networks: sorting, halving and the signature of a selection network."""

import itertools

import numpy as np

from fragile import batcher_odd_even, build_halver, check_signature_invariance, depth_and_size
from fragile.networks import (
    RandomMatching, measure_halver_epsilon, relabel, selection_to_partition, simulate_values, to_text,
    verify_sorting,
)

net = batcher_odd_even(8)
print("Batcher's odd-even mergesort on 8 wires")
print(to_text(net))
print("depth, size =", depth_and_size(net), "| sorts every 0-1 input:", verify_sorting(net))

for k in range(1, 8):
    d, s = depth_and_size(batcher_odd_even(2 ** k))
    print(f"  n=2^{k}: depth {d:>2}, size {s:>4}")

print("\nHalvers: each round matches the left half against a random permutation of the right half")
for rounds in (1, 2, 4, 8):
    eps = measure_halver_epsilon(build_halver(16, RandomMatching(rounds, 0)))
    print(f"  16 wires, {rounds} rounds: worst misplaced fraction {eps:.4f}")

print("\nA selection network's other outputs keep their 0/1 signature when two")
print("rank-neighbouring inputs trade places; that is what lets it be rewired into a partition.")
perm = np.random.default_rng(2).permutation(8)
scrambled = relabel(net, perm)
t = 3
out = int(perm[t - 1])
print("  invariant:", check_signature_invariance(scrambled, t, trials=None, output=out))
order = selection_to_partition(scrambled, t, output=out)
print(f"  outputs holding the {t} smallest: {order[:t]}, the rest: {order[t:]}")
bits = np.array(list(itertools.product((0, 1), repeat=8)))
enough = bits.sum(axis=1) <= 8 - t
y = simulate_values(scrambled, bits[enough])
print("  on every 0-1 input with at least", t, "zeros those outputs are all 0:",
      bool((y[:, order[:t]] == 0).all()))
