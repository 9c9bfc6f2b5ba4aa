"""Integrated information of classical bit-string distributions.

Character ``j`` (left to right) of a word's string form is bit ``j`` of its
integer encoding, so ``"1000"`` encodes 1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from ._validation import ConfigError, InvalidStateError, check_probability_vector
from .info import shannon_entropy

__all__ = [
    "BitStringCode",
    "ClassicalState",
    "Cut",
    "CutResult",
    "classical_phi",
    "phi_curve",
    "hamming84",
    "parity_code",
    "random_code",
    "code_capacity",
    "hopfield_capacity",
    "ising_distribution",
    "ising_phi_sweep",
    "read_code",
    "write_code",
    "EXHAUSTIVE_MAX_BITS",
]

EXHAUSTIVE_MAX_BITS = 24
_TIE = 1e-12


@dataclass(frozen=True)
class BitStringCode:
    """A set of distinct ``n``-bit words, stored as sorted integers."""

    n: int
    words: tuple

    def __post_init__(self):
        if not 1 <= self.n <= EXHAUSTIVE_MAX_BITS:
            raise InvalidStateError(f"bit length must be in [1, {EXHAUSTIVE_MAX_BITS}], got {self.n}")
        w = tuple(sorted(int(x) for x in self.words))
        if not w:
            raise InvalidStateError("code must contain at least one word")
        if len(set(w)) != len(w):
            raise InvalidStateError("code words must be distinct")
        if w[0] < 0 or w[-1] >= 1 << self.n:
            raise InvalidStateError(f"word outside [0, 2^{self.n})")
        object.__setattr__(self, "words", w)

    @classmethod
    def from_strings(cls, strings):
        strings = [s.strip() for s in strings if s.strip()]
        if not strings:
            raise InvalidStateError("no code words given")
        n = len(strings[0])
        if any(len(s) != n or set(s) - {"0", "1"} for s in strings):
            raise InvalidStateError("code words must be equal-length strings of 0/1")
        return cls(n, tuple(int(s[::-1], 2) for s in strings))

    def to_strings(self):
        return [format(w, f"0{self.n}b")[::-1] for w in self.words]

    def to_array(self):
        """``m x n`` 0/1 matrix, one word per row."""
        w = np.asarray(self.words, dtype=np.int64)
        return ((w[:, None] >> np.arange(self.n)) & 1).astype(np.int8)

    @property
    def size(self):
        return len(self.words)

    @property
    def hamming_distance(self):
        a = self.to_array()
        if len(a) < 2:
            return self.n
        d = (a[:, None, :] != a[None, :, :]).sum(-1)
        np.fill_diagonal(d, self.n + 1)
        return int(d.min())


@dataclass(frozen=True)
class ClassicalState:
    """Probability distribution over ``n``-bit strings, stored sparsely."""

    n: int
    states: np.ndarray
    probs: np.ndarray

    @classmethod
    def from_code(cls, code):
        m = code.size
        return cls(code.n, np.asarray(code.words, dtype=np.int64), np.full(m, 1.0 / m))

    @classmethod
    def from_table(cls, probs):
        p = check_probability_vector(probs)
        n = int(round(math.log2(p.size)))
        if 1 << n != p.size:
            raise InvalidStateError(f"table length {p.size} is not a power of two")
        nz = np.flatnonzero(p > 0)
        return cls(n, nz.astype(np.int64), p[nz])

    def entropy(self):
        return shannon_entropy(self.probs / self.probs.sum())

    def permute_bits(self, perm):
        """Relabel bits: new bit ``perm[j]`` carries old bit ``j``."""
        s = np.zeros_like(self.states)
        for j, pj in enumerate(perm):
            s |= ((self.states >> j) & 1) << pj
        return ClassicalState(self.n, s, self.probs.copy())


class Cut(NamedTuple):
    first: tuple
    second: tuple

    def mask_string(self, n=None):
        n = len(self.first) + len(self.second) if n is None else n
        return "".join("1" if j in self.first else "0" for j in range(n))


class CutResult(NamedTuple):
    phi: float
    cut: Cut
    certified: bool


def _entropy_of_labels(labels, probs):
    _, inv = np.unique(labels, return_inverse=True)
    return _entropy_of_counts(np.bincount(inv, weights=probs))


def _entropy_of_counts(q):
    q = q[q > 0]
    return float(-np.sum(q * np.log2(q)))


def _marginal_entropy(bitcols, probs, bits):
    """Entropy of the marginal on ``bits``; ``bitcols[j]`` is the 0/1 column of bit ``j``."""
    label = np.zeros(len(probs), dtype=np.int64)
    for i, b in enumerate(bits):
        label |= bitcols[b] << i
    if len(bits) <= 20:
        return _entropy_of_counts(np.bincount(label, weights=probs))
    return _entropy_of_labels(label, probs)


def _bitcols(states, n):
    return [(states >> j) & 1 for j in range(n)]


def _cut_mi(bitcols, probs, sub, n, s_total):
    rest = [j for j in range(n) if j not in sub]
    return _marginal_entropy(bitcols, probs, sub) + _marginal_entropy(bitcols, probs, rest) - s_total


def classical_phi(state, k, mode="auto", seed=0, restarts=32):
    """Mutual information across the cruelest ``k``-bit cut.

    ``mode="exhaustive"`` scans all ``C(n, k)`` subsets in lexicographic
    order (ties keep the earliest). ``mode="greedy"`` runs a bit-swap descent
    from ``restarts`` random cuts and returns an upper bound, flagged as
    uncertified. ``mode="auto"`` picks exhaustive when ``n <= 24``.
    """
    n = state.n
    if not 1 <= k <= n // 2:
        raise ConfigError(f"cut size k={k} outside [1, {n // 2}]")
    probs = state.probs / state.probs.sum()
    cols = _bitcols(np.asarray(state.states, dtype=np.int64), n)
    s_total = _entropy_of_labels(state.states, probs)
    if mode == "auto":
        mode = "exhaustive" if n <= EXHAUSTIVE_MAX_BITS else "greedy"
    if mode == "exhaustive":
        best, best_sub = math.inf, None
        for sub in itertools.combinations(range(n), k):
            if 2 * k == n and sub[0] != 0:
                break  # remaining subsets are complements of ones already scored
            v = _cut_mi(cols, probs, sub, n, s_total)
            if v < best - _TIE:
                best, best_sub = v, sub
        return CutResult(max(0.0, best), _make_cut(best_sub, n), True)
    if mode == "greedy":
        return _greedy_cut(cols, probs, n, k, s_total, seed, restarts)
    raise ConfigError(f"unknown mode {mode!r}")


def _make_cut(sub, n):
    sub = tuple(sorted(sub))
    return Cut(sub, tuple(j for j in range(n) if j not in sub))


def _greedy_cut(cols, probs, n, k, s_total, seed, restarts):
    rng = np.random.default_rng(seed)
    best, best_sub = math.inf, None

    def score(sub):
        return _cut_mi(cols, probs, tuple(sorted(sub)), n, s_total)

    for _ in range(restarts):
        sub = set(int(x) for x in rng.choice(n, size=k, replace=False))
        cur = score(sub)
        improved = True
        while improved:
            improved = False
            for a in sorted(sub):
                for b in range(n):
                    if b in sub:
                        continue
                    cand = (sub - {a}) | {b}
                    v = score(cand)
                    if v < cur - _TIE:
                        sub, cur, improved = cand, v, True
                        break
                if improved:
                    break
        key = tuple(sorted(sub))
        if cur < best - _TIE or (abs(cur - best) <= _TIE and key < best_sub):
            best, best_sub = cur, key
    return CutResult(max(0.0, best), _make_cut(best_sub, n), False)


def phi_curve(state, ks=None, **kw):
    """``[(k, phi, cut), ...]`` for each cut size ``k`` (default ``1..n//2``)."""
    ks = range(1, state.n // 2 + 1) if ks is None else ks
    out = []
    for k in ks:
        r = classical_phi(state, k, **kw)
        out.append((k, r.phi, r.cut))
    return out


_HAMMING84_M = np.array(
    [
        [0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 1, 1, 1, 1],
        [0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1],
        [0, 1, 1, 0, 1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 1],
        [0, 1, 0, 1, 0, 1, 0, 1, 1, 0, 1, 0, 1, 0, 1, 0],
        [0, 1, 0, 1, 1, 0, 1, 0, 0, 1, 0, 1, 1, 0, 1, 0],
        [0, 0, 1, 1, 0, 0, 1, 1, 1, 1, 0, 0, 1, 1, 0, 0],
        [0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0],
        [0, 1, 1, 0, 0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1],
    ],
    dtype=np.int8,
)


def hamming84():
    """The extended Hamming(8,4) code: the 16 columns of its code matrix."""
    cols = ["".join(str(b) for b in _HAMMING84_M[:, j]) for j in range(16)]
    return BitStringCode.from_strings(cols)


def parity_code(n=8):
    """All even-parity ``n``-bit words."""
    return BitStringCode(n, tuple(w for w in range(1 << n) if bin(w).count("1") % 2 == 0))


def random_code(n, m, seed):
    """``m`` distinct words drawn uniformly from ``2^n`` with ``numpy.random.default_rng(seed)``."""
    if m > 1 << n:
        raise ConfigError(f"cannot draw {m} distinct words of length {n}")
    if m < 1:
        raise ConfigError("m must be positive")
    rng = np.random.default_rng(seed)
    words = rng.choice(1 << n, size=m, replace=False)
    return BitStringCode(n, tuple(int(w) for w in words))


class Capacity(NamedTuple):
    exact_bits: float
    approx_bits: float


def code_capacity(n, k):
    """``log2 C(2^n, k)`` via log-gamma, plus the approximation ``k (n - log2 k)``."""
    big = 2.0**n
    if not 1 <= k <= big:
        raise ConfigError(f"k={k} outside [1, 2^{n}]")
    kk = min(k, big - k)
    if kk <= 1_000_000:
        # sum of log(N - i) avoids lgamma cancellation when N is huge
        i = np.arange(int(kk), dtype=float)
        ln = kk * n * math.log(2) + float(np.sum(np.log1p(-i / big))) - math.lgamma(kk + 1)
    else:
        ln = math.lgamma(big + 1) - math.lgamma(kk + 1) - math.lgamma(big - kk + 1)
    return Capacity(ln / math.log(2), k * (n - math.log2(k)))


class HopfieldCapacity(NamedTuple):
    attractor_bits: float
    log2_neurons: float


def hopfield_capacity(neurons):
    """``log2(0.14 n)`` attractor bits, reported alongside ``log2 n``."""
    if neurons < 8:
        raise ConfigError("need at least 8 neurons")
    return HopfieldCapacity(math.log2(0.14 * neurons), math.log2(neurons))


def _lattice_bonds(side):
    bonds = set()
    for r in range(side):
        for c in range(side):
            i = r * side + c
            for j in (r * side + (c + 1) % side, ((r + 1) % side) * side + c):
                if i != j:
                    bonds.add((min(i, j), max(i, j)))
    return sorted(bonds)


def ising_distribution(side, temperature, coupling=1.0):
    """Exact Boltzmann table over ``2^(side^2)`` spin states (periodic lattice).

    Bit ``j`` set means spin ``j`` is up; sites are numbered row-major.
    """
    if side < 2 or side * side > 16:
        raise ConfigError(f"exact enumeration needs 2 <= side and side^2 <= 16, got side={side}")
    if temperature <= 0:
        raise ConfigError("temperature must be positive")
    n = side * side
    states = np.arange(1 << n, dtype=np.int64)
    spins = 2 * ((states[:, None] >> np.arange(n)) & 1) - 1
    energy = np.zeros(states.size)
    for i, j in _lattice_bonds(side):
        energy -= coupling * spins[:, i] * spins[:, j]
    logw = -(energy - energy.min()) / temperature
    w = np.exp(logw - logw.max())
    return ClassicalState(n, states, w / w.sum())


def _line_cuts(side):
    """Half-lattice cuts along straight rows or columns."""
    cuts = []
    k = (side * side) // 2
    for rows in range(1, side):
        sub = [r * side + c for r in range(rows) for c in range(side)]
        if len(sub) == k:
            cuts.append(tuple(sub))
            cuts.append(tuple(sorted(c * side + r for r in range(rows) for c in range(side))))
    return cuts


def ising_phi_sweep(side, temps, coupling=1.0):
    """``[(T, phi, cut), ...]`` for the periodic nearest-neighbour Ising lattice.

    Equal bipartitions use all ``C(n, n//2)`` cuts when ``side^2 <= 9``,
    otherwise only straight half-lattice cuts.
    """
    out = []
    for t in temps:
        st = ising_distribution(side, float(t), coupling)
        n = st.n
        k = n // 2
        if n <= 9:
            r = classical_phi(st, k)
            out.append((float(t), r.phi, r.cut))
            continue
        probs = st.probs
        cols = _bitcols(st.states, n)
        s_total = _entropy_of_labels(st.states, probs)
        best, best_sub = math.inf, None
        for sub in _line_cuts(side):
            v = _cut_mi(cols, probs, sub, n, s_total)
            if v < best - _TIE:
                best, best_sub = v, sub
        out.append((float(t), max(0.0, best), _make_cut(best_sub, n)))
    return out


def read_code(path):
    """Read a code file: one bit string per line, blank lines and ``#`` comments ignored."""
    lines = Path(path).read_text().splitlines()
    return BitStringCode.from_strings([ln for ln in lines if ln.strip() and not ln.startswith("#")])


def write_code(code, path):
    Path(path).write_text("\n".join(code.to_strings()) + "\n")
