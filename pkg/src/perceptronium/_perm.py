"""Search over arrangements of a spectrum on an ``l x m`` grid.

An arrangement is an integer array ``order`` of length ``n`` where cell ``c``
(row-major) holds ``values[order[c]]`` and ``values`` is sorted descending.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from ._validation import ConfigError

EXHAUSTIVE_CAP = 400_000
TIE = 1e-12
_CHUNK = 1 << 15


def tie_groups(values, tol=1e-12):
    """Group labels for a descending-sorted vector; equal within ``tol`` share a label."""
    labels = np.zeros(len(values), dtype=np.int64)
    scale = max(1.0, float(np.max(np.abs(values)))) if len(values) else 1.0
    for i in range(1, len(values)):
        same = abs(values[i] - values[i - 1]) <= tol * scale
        labels[i] = labels[i - 1] if same else labels[i - 1] + 1
    return labels


def _multiset_count(labels):
    _, counts = np.unique(labels, return_counts=True)
    total = math.factorial(len(labels))
    for c in counts:
        total //= math.factorial(int(c))
    return total


def count_orders(values, prune=True):
    labels = tie_groups(values)
    mid = labels[1:-1] if prune and len(labels) >= 2 else labels
    return _multiset_count(mid)


def _multiset_perms(labels):
    """Distinct permutations of ``labels`` in lexicographic order."""
    a = sorted(int(x) for x in labels)
    n = len(a)
    while True:
        yield tuple(a)
        i = n - 2
        while i >= 0 and a[i] >= a[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while a[j] <= a[i]:
            j -= 1
        a[i], a[j] = a[j], a[i]
        a[i + 1 :] = reversed(a[i + 1 :])


def _labels_to_indices(perms, labels, offset):
    """Map label sequences to canonical index sequences (first free index per label)."""
    starts = {}
    for idx, lab in enumerate(labels):
        starts.setdefault(int(lab), idx + offset)
    perms = np.asarray(perms, dtype=np.int64)
    out = np.empty_like(perms)
    for r, row in enumerate(perms):
        nxt = dict(starts)
        for c, lab in enumerate(row):
            out[r, c] = nxt[lab]
            nxt[lab] += 1
    return out


def enumerate_orders(values, prune=True):
    """All distinct arrangements, optionally fixing the largest first and smallest last."""
    n = len(values)
    labels = tie_groups(values)
    if prune and n >= 2:
        mid_labels = labels[1:-1]
        offset = 1
    else:
        mid_labels = labels
        offset = 0
    k = len(mid_labels)
    if len(np.unique(mid_labels)) == k:
        mid = np.array(list(itertools.permutations(range(offset, offset + k))), dtype=np.int64)
        if k == 0:
            mid = np.zeros((1, 0), dtype=np.int64)
    else:
        mid = _labels_to_indices(list(_multiset_perms(mid_labels)), mid_labels, offset)
    if prune and n >= 2:
        first = np.zeros((len(mid), 1), dtype=np.int64)
        last = np.full((len(mid), 1), n - 1, dtype=np.int64)
        return np.hstack([first, mid, last])
    return mid


def exhaustive_min(values, shape, score, prune=True):
    """Minimize ``score(grids)`` over all arrangements; ties keep the earliest.

    ``score`` maps a stack ``(P, l, m)`` of grids to ``P`` values.
    """
    values = np.asarray(values, dtype=float)
    n_orders = count_orders(values, prune)
    if n_orders > EXHAUSTIVE_CAP:
        raise ConfigError(
            f"{n_orders} arrangements exceed the exhaustive cap {EXHAUSTIVE_CAP}; use mode='heuristic'"
        )
    orders = enumerate_orders(values, prune)
    l, m = shape
    best_val, best_idx = math.inf, -1
    for start in range(0, len(orders), _CHUNK):
        block = orders[start : start + _CHUNK]
        vals = score(values[block].reshape(-1, l, m))
        lo = vals.min()
        if lo < best_val - TIE:
            best_val = float(lo)
            best_idx = start + int(np.flatnonzero(vals <= lo + TIE)[0])
    return best_val, orders[best_idx]


def anneal_min(values, shape, score, seed=0, restarts=8, steps=4000, prune=True):
    """Simulated annealing over pairwise cell swaps.

    Schedule: temperature starts at the standard deviation of score changes
    from 64 random swaps and decays geometrically to 1e-4 of that over
    ``steps`` moves; ``restarts`` independent chains, best state kept.
    """
    values = np.asarray(values, dtype=float)
    n = len(values)
    l, m = shape
    rng = np.random.default_rng(seed)
    free = np.arange(1, n - 1) if prune and n > 2 else np.arange(n)

    def f(order):
        return float(score(values[order].reshape(1, l, m))[0])

    best_val, best_order = math.inf, None
    for _ in range(restarts):
        order = np.arange(n)
        order[free] = rng.permutation(free)
        cur = f(order)
        deltas = []
        for _ in range(64):
            a, b = rng.choice(free, 2, replace=False)
            o2 = order.copy()
            o2[[a, b]] = o2[[b, a]]
            deltas.append(f(o2) - cur)
        t0 = max(float(np.std(deltas)), 1e-12)
        decay = 1e-4 ** (1.0 / max(steps, 1))
        temp = t0
        chain_best, chain_order = cur, order.copy()
        for _ in range(steps):
            a, b = rng.choice(free, 2, replace=False)
            o2 = order.copy()
            o2[[a, b]] = o2[[b, a]]
            v = f(o2)
            if v <= cur or rng.random() < math.exp(-(v - cur) / temp):
                order, cur = o2, v
                if cur < chain_best - TIE:
                    chain_best, chain_order = cur, order.copy()
            temp *= decay
        if chain_best < best_val - TIE:
            best_val, best_order = chain_best, chain_order
    return best_val, best_order


def search(values, shape, score, mode="auto", seed=0, prune=True):
    """Dispatch to exhaustive or annealing search. Returns ``(value, order, certified)``."""
    if mode == "auto":
        mode = "exhaustive" if count_orders(values, prune) <= EXHAUSTIVE_CAP else "heuristic"
    if mode == "exhaustive":
        v, o = exhaustive_min(values, shape, score, prune)
        return v, o, True
    if mode == "heuristic":
        v, o = anneal_min(values, shape, score, seed=seed, prune=prune)
        return v, o, False
    raise ConfigError(f"unknown mode {mode!r}")
