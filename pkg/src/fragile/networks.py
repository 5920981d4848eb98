"""Comparator networks: building, running, verifying and analysing them."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels
from .core import ValueOracle, less, less_many
from .errors import (
    IdenticalIds,
    MalformedNetwork,
    NotPowerOfTwo,
    NotSelectionNetwork,
    OddWidth,
    OutOfRange,
    TooWide,
    WidthMismatch,
)

MAX_VERIFY_WIDTH = 24
# below this width, running comparators one by one beats numpy overhead
_SCALAR_WIDTH = 32


class Comparator(NamedTuple):
    low: int
    high: int


class ComparatorNetwork:
    """A width and an ordered list of layers of wire-disjoint comparators.

    Layers are kept as pairs of int arrays (low wires, high wires) so large
    networks execute one numpy operation per layer.
    """

    def __init__(self, width: int, layers=()):
        self.width = int(width)
        self._layers = []
        for layer in layers:
            if isinstance(layer, tuple) and len(layer) == 2 and isinstance(layer[0], np.ndarray):
                lo, hi = layer
            else:
                pairs = [tuple(c) for c in layer]
                lo = np.array([p[0] for p in pairs], dtype=np.int64)
                hi = np.array([p[1] for p in pairs], dtype=np.int64)
            self._layers.append((np.asarray(lo, dtype=np.int64), np.asarray(hi, dtype=np.int64)))
        self._validate()

    def _validate(self):
        for lo, hi in self._layers:
            if len(lo) != len(hi):
                raise MalformedNetwork("layer has unequal low/high lists")
            if len(lo) == 0:
                continue
            if np.any(lo == hi):
                raise MalformedNetwork("comparator joins a wire to itself")
            if min(lo.min(), hi.min()) < 0 or max(lo.max(), hi.max()) >= self.width:
                raise MalformedNetwork("comparator wire outside network width")
            wires = np.concatenate([lo, hi])
            if len(np.unique(wires)) != len(wires):
                raise MalformedNetwork("wire used twice within one layer")

    @property
    def layers(self):
        return [[Comparator(int(a), int(b)) for a, b in zip(lo, hi)] for lo, hi in self._layers]

    def layer_arrays(self):
        return list(self._layers)

    def comparators(self):
        for lo, hi in self._layers:
            for a, b in zip(lo.tolist(), hi.tolist()):
                yield Comparator(a, b)

    @property
    def size(self):
        return sum(len(lo) for lo, _ in self._layers)

    def __eq__(self, other):
        if not isinstance(other, ComparatorNetwork) or self.width != other.width:
            return False
        a = [l for l in self._layers if len(l[0])]
        b = [l for l in other._layers if len(l[0])]
        return len(a) == len(b) and all(
            np.array_equal(x[0], y[0]) and np.array_equal(x[1], y[1]) for x, y in zip(a, b)
        )

    def __repr__(self):
        return f"ComparatorNetwork(width={self.width}, layers={len(self._layers)}, size={self.size})"


def packed(net: ComparatorNetwork) -> ComparatorNetwork:
    """Repack comparators greedily into the earliest layer where both wires are free."""
    level = np.zeros(net.width, dtype=np.int64)
    slots = {}
    for lo, hi in net.layer_arrays():
        if len(lo) == 0:
            continue
        # comparators of one layer are wire-disjoint, so they can be placed together
        at = np.maximum(level[lo], level[hi])
        level[lo] = at + 1
        level[hi] = at + 1
        for a, b, d in zip(lo.tolist(), hi.tolist(), at.tolist()):
            slots.setdefault(d, []).append((a, b))
    return ComparatorNetwork(net.width, [slots[d] for d in sorted(slots)])


def depth_and_size(net: ComparatorNetwork):
    """Longest comparator path and comparator count."""
    level = np.zeros(net.width, dtype=np.int64)
    for lo, hi in net.layer_arrays():
        if len(lo) == 0:
            continue
        at = np.maximum(level[lo], level[hi]) + 1
        level[lo] = at
        level[hi] = at
    depth = int(level.max()) if net.width else 0
    return depth, net.size


def relabel(net: ComparatorNetwork, perm) -> ComparatorNetwork:
    """Rename wire w to perm[w] everywhere in the network."""
    perm = np.asarray(perm, dtype=np.int64)
    return ComparatorNetwork(net.width, [(perm[lo], perm[hi]) for lo, hi in net.layer_arrays()])


def _batcher_layer_arrays(n):
    layers = []
    p = 1
    while p < n:
        k = p
        while k >= 1:
            j = np.arange(k % p, n - k, 2 * k)
            x = (j[:, None] + np.arange(k)).ravel()
            x = x[(x + k < n) & (x // (2 * p) == (x + k) // (2 * p))]
            layers.append((x.astype(np.int32), (x + k).astype(np.int32)))
            k //= 2
        p *= 2
    return layers


@lru_cache(maxsize=4)
def _batcher_cached(n):
    return _batcher_layer_arrays(n)


def batcher_odd_even(n: int) -> ComparatorNetwork:
    """Batcher's odd-even mergesort network on n = 2^k wires."""
    if n < 1 or n & (n - 1):
        raise NotPowerOfTwo(f"width {n} is not a power of two")
    return ComparatorNetwork(n, _batcher_cached(n))


def _pruned_layers(m):
    """Batcher layers for the next power of two, keeping comparators inside [0, m).

    Dropping comparators that touch padding wires is exact when the padding
    holds +infinity: such a comparator never moves anything.
    """
    P = 1 << max(0, (m - 1).bit_length())
    out = []
    for lo, hi in _batcher_cached(P):
        if P != m:
            keep = hi < m
            lo, hi = lo[keep], hi[keep]
        if len(lo):
            out.append((lo, hi))
    return out


@lru_cache(maxsize=64)
def _small_sorter(m):
    return [list(zip(lo.tolist(), hi.tolist())) for lo, hi in _pruned_layers(m)]


def sorting_network(m: int) -> ComparatorNetwork:
    """A Batcher sorting network for any width m >= 1."""
    if m < 1:
        raise ValueError("width must be positive")
    return ComparatorNetwork(m, _pruned_layers(m))


def _run_scalar(layers, oracle, ledger, arr):
    for layer in layers:
        for a, b in layer:
            x, y = arr[a], arr[b]
            if not less(oracle, ledger, x, y):
                arr[a], arr[b] = y, x
    return arr


def _run_layers(layers, oracle, ledger, arr):
    arr = np.array(arr, dtype=np.int64)
    for lo, hi in layers:
        x, y = arr[lo], arr[hi]
        lt = less_many(oracle, ledger, x, y)
        arr[lo] = np.where(lt, x, y)
        arr[hi] = np.where(lt, y, x)
    return arr


def execute(net: ComparatorNetwork, oracle, ledger, arrangement):
    """Route the ids in `arrangement` through the network; returns the output ids."""
    if len(arrangement) != net.width:
        raise WidthMismatch(f"arrangement of length {len(arrangement)} on width {net.width}")
    if net.width <= _SCALAR_WIDTH:
        return _run_scalar(net.layers, oracle, ledger, list(arrangement))
    return _run_layers(net.layer_arrays(), oracle, ledger, arrangement).tolist()


@lru_cache(maxsize=8)
def _flat_pruned(m):
    layers = _pruned_layers(m)
    return (np.concatenate([lo for lo, _ in layers]).astype(np.int64),
            np.concatenate([hi for _, hi in layers]).astype(np.int64))


def _compiled_ok(oracle, ledger):
    return (type(oracle) is ValueOracle and ledger.events is None
            and oracle.values.ndim == 1 and oracle.values.dtype.kind in "iuf")


def network_sort(ids, oracle, ledger):
    """Sort ids with a Batcher network; returns a list, smallest first."""
    m = len(ids)
    if m <= 1:
        return list(ids)
    if m > _SCALAR_WIDTH and _compiled_ok(oracle, ledger):
        arr = np.array(ids, dtype=np.int64)
        if arr.min() < 0 or arr.max() >= ledger.n:
            raise OutOfRange(f"ids outside ledger of size {ledger.n}")
        if len(np.unique(arr)) != m:
            raise IdenticalIds("network_sort needs distinct ids")
        lo, hi = _flat_pruned(m)
        ledger.work += int(_kernels.run_network(oracle.values, arr, lo, hi, ledger.counts))
        return arr.tolist()
    if m <= _SCALAR_WIDTH:
        return _run_scalar(_small_sorter(m), oracle, ledger, list(ids))
    return _run_layers(_pruned_layers(m), oracle, ledger, ids).tolist()


def simulate_values(net: ComparatorNetwork, values):
    """Run the network directly on a (batch, width) array of values."""
    v = np.array(values, copy=True)
    if v.ndim == 1:
        v = v[None, :]
    for lo, hi in net.layer_arrays():
        x, y = v[:, lo], v[:, hi]
        v[:, lo] = np.minimum(x, y)
        v[:, hi] = np.maximum(x, y)
    return v


def _zero_one_outputs(net: ComparatorNetwork):
    """Outputs for all 2^w 0-1 inputs, bit-sliced: row t packs wire t over every input."""
    w = net.width
    if w > MAX_VERIFY_WIDTH:
        raise TooWide(f"width {w} exceeds exhaustive limit {MAX_VERIFY_WIDTH}")
    idx = np.arange(1 << w, dtype=np.int64)
    wires = np.stack([np.packbits(((idx >> t) & 1).astype(bool)) for t in range(w)]) if w else np.zeros((0, 1), np.uint8)
    for lo, hi in net.layer_arrays():
        a, b = wires[lo], wires[hi]
        wires[lo] = a & b
        wires[hi] = a | b
    return wires


def verify_sorting(net: ComparatorNetwork) -> bool:
    """Exhaustive 0-1 check: does the network sort every input?"""
    wires = _zero_one_outputs(net)
    for t in range(net.width - 1):
        if np.any(wires[t] & ~wires[t + 1]):
            return False
    return True


@dataclass(frozen=True)
class ExactSort:
    pass


@dataclass(frozen=True)
class RandomMatching:
    rounds: int
    seed: int = 0


def build_halver(n: int, variant=ExactSort()) -> ComparatorNetwork:
    if n % 2:
        raise OddWidth(f"halver width {n} is odd")
    if isinstance(variant, ExactSort):
        return sorting_network(n) if n else ComparatorNetwork(0)
    if isinstance(variant, RandomMatching):
        if variant.rounds < 1:
            raise ValueError("RandomMatching needs at least one round")
        return random_matching_network(n, variant.rounds, np.random.default_rng(variant.seed))
    raise TypeError(f"unknown halver variant {variant!r}")


def random_matching_network(n, rounds, rng):
    """Rounds of random matchings between the left and right halves, min to the left.

    For odd n the right half is one wire larger and one right wire sits out
    each round.
    """
    h = n // 2
    left = np.arange(h, dtype=np.int64)
    layers = []
    for _ in range(rounds):
        right = h + rng.permutation(n - h)[:h]
        layers.append((left.copy(), right.astype(np.int64)))
    return ComparatorNetwork(n, layers)


def measure_halver_epsilon(net: ComparatorNetwork) -> float:
    """Worst fraction of the m smallest (or m largest) landing in the wrong half, m <= n/2."""
    w = net.width
    wires = _zero_one_outputs(net)
    N = 1 << w
    h = w // 2
    ones = np.zeros(N, dtype=np.int16)
    idx = np.arange(N, dtype=np.int64)
    for t in range(w):
        ones += ((idx >> t) & 1).astype(np.int16)
    zeros = w - ones
    right_zeros = np.zeros(N, dtype=np.int16)
    left_ones = np.zeros(N, dtype=np.int16)
    for t in range(w):
        bits = np.unpackbits(wires[t])[:N].astype(np.int16)
        if t < h:
            left_ones += bits
        else:
            right_zeros += 1 - bits
    worst = 0
    small = zeros <= w / 2
    if small.any():
        worst = max(worst, int(right_zeros[small].max()))
    large = ones <= w / 2
    if large.any():
        worst = max(worst, int(left_ones[large].max()))
    return worst / w if w else 0.0


def signature(values, a):
    return tuple(0 if v <= a else 1 for v in values)


def _selection_inputs(n, trials, rng):
    if trials is None or math.factorial(n) <= trials:
        return np.array(list(itertools.permutations(range(1, n + 1))), dtype=np.int64)
    return np.array([rng.permutation(n) + 1 for _ in range(trials)], dtype=np.int64)


def check_signature_invariance(net: ComparatorNetwork, t: int, trials: Optional[int] = None,
                               seed: int = 0, output: int = 0) -> bool:
    """Outputs keep their signature when two rank-neighbouring inputs swap.

    Inputs are permutations of 1..n, so the rank-t value is t itself.  With
    `trials=None` (or when n! <= trials) every permutation is tested.  The
    signature is read on every output except the selection output.
    """
    n = net.width
    if not 1 <= t <= n:
        raise ValueError("rank out of range")
    X = _selection_inputs(n, trials, np.random.default_rng(seed))
    Y = simulate_values(net, X)
    if np.any(Y[:, output] != t):
        raise NotSelectionNetwork(f"output {output} does not always carry rank {t}")
    keep = np.arange(n) != output
    base_sig = Y[:, keep] > t
    for r in range(1, n):
        Xs = X.copy()
        Xs[X == r] = r + 1
        Xs[X == r + 1] = r
        Ys = simulate_values(net, Xs)
        if np.any(Ys[:, output] != t):
            raise NotSelectionNetwork(f"output {output} does not always carry rank {t}")
        if not np.array_equal(Ys[:, keep] > t, base_sig):
            return False
    return True


def selection_to_partition(net: ComparatorNetwork, t: int, output: int = 0, probe=None,
                           trials: int = 64, seed: int = 0):
    """Output order under which the first t outputs carry the t smallest inputs.

    One probe input decides the order: positions whose value is <= the
    rank-t value come first, each group in wire order.  The network is first
    checked as a selection network on `trials` random inputs.
    """
    n = net.width
    check_signature_invariance(net, t, trials=trials, seed=seed, output=output)
    if probe is None:
        probe = np.arange(1, n + 1)
    y = simulate_values(net, np.asarray(probe))[0]
    if y[output] != t:
        raise NotSelectionNetwork(f"output {output} does not carry rank {t} on the probe")
    sig = signature(y.tolist(), t)
    return [p for p in range(n) if sig[p] == 0] + [p for p in range(n) if sig[p] == 1]


def to_text(net: ComparatorNetwork) -> str:
    lines = [f"width {net.width} layers {len(net.layer_arrays())}"]
    for d, (lo, hi) in enumerate(net.layer_arrays()):
        for a, b in zip(lo.tolist(), hi.tolist()):
            lines.append(f"{d} {a} {b}")
    return "\n".join(lines) + "\n"


def from_text(text: str) -> ComparatorNetwork:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 4 or rows[0][0] != "width" or rows[0][2] != "layers":
        raise MalformedNetwork("expected header 'width N layers L'")
    try:
        width, nlayers = int(rows[0][1]), int(rows[0][3])
        layers = [[] for _ in range(nlayers)]
        for r in rows[1:]:
            if len(r) != 3:
                raise MalformedNetwork(f"bad comparator line {' '.join(r)!r}")
            d, a, b = map(int, r)
            if not 0 <= d < nlayers:
                raise MalformedNetwork(f"layer {d} outside declared range")
            layers[d].append((a, b))
    except ValueError as e:
        if isinstance(e, MalformedNetwork):
            raise
        raise MalformedNetwork(str(e)) from None
    return ComparatorNetwork(width, layers)


def to_json(net: ComparatorNetwork) -> str:
    layers = [[[a, b] for a, b in zip(lo.tolist(), hi.tolist())] for lo, hi in net.layer_arrays()]
    return json.dumps({"width": net.width, "layers": layers})


def from_json(text: str) -> ComparatorNetwork:
    d = json.loads(text)
    return ComparatorNetwork(d["width"], [[tuple(c) for c in layer] for layer in d["layers"]])
