"""Quantum integrated information via eigenvalue-arrangement search.

Mutual information over all unitaries is minimized in a basis where the
state is diagonal, so the search reduces to placing the eigenvalues on the
``l x m`` grid (rows = first factor) and scoring the resulting classical
joint distribution.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from . import _perm
from ._validation import ConfigError, InvalidStateError, check_density_matrix, check_shape
from .info import clamp_spectrum, grid_mutual_information

__all__ = [
    "QuantumPhiResult",
    "quantum_phi",
    "quantum_phi_spectrum",
    "cruelest_basis",
    "grid_separable",
    "conjugate_partition",
    "young_phi",
    "partitions_in_box",
    "cruelest_young",
    "max_young_phi",
    "projection_spectrum",
    "max_phi_search",
]


class QuantumPhiResult(NamedTuple):
    phi: float
    permutation: tuple
    certified: bool
    spectrum: np.ndarray


def quantum_phi_spectrum(eigs, shape, mode="auto", seed=0, prune=True):
    """Phi for a state with spectrum ``eigs``.

    ``permutation[c]`` is the index, into the descending-sorted spectrum, of
    the eigenvalue placed in grid cell ``c``.
    """
    lam = np.sort(clamp_spectrum(eigs))[::-1]
    shape = check_shape(shape, lam.size)
    lam = lam / lam.sum()
    val, order, cert = _perm.search(lam, shape, grid_mutual_information, mode=mode, seed=seed, prune=prune)
    return QuantumPhiResult(max(0.0, val), tuple(int(i) for i in order), cert, lam)


def quantum_phi(rho, shape, mode="auto", seed=0, prune=True):
    """Minimum mutual information over all unitary changes of basis."""
    rho = check_density_matrix(rho)
    return quantum_phi_spectrum(np.linalg.eigvalsh(rho), shape, mode=mode, seed=seed, prune=prune)


def cruelest_basis(rho, shape, mode="auto", seed=0):
    """Unitary ``V`` such that ``V^dagger rho V`` is the diagonal state attaining Phi."""
    rho = check_density_matrix(rho)
    lam, vec = np.linalg.eigh(rho)
    vec = vec[:, ::-1]
    res = quantum_phi_spectrum(lam, shape, mode=mode, seed=seed)
    return vec[:, list(res.permutation)], res


def grid_separable(grid, tol=1e-10):
    """True iff the joint grid equals the outer product of its marginals."""
    g = np.asarray(grid, dtype=float)
    if g.ndim != 2 or g.min() < -tol or abs(g.sum() - 1.0) > 1e-10:
        raise InvalidStateError("grid must be a non-negative 2-D array summing to 1")
    return bool(np.max(np.abs(g - np.outer(g.sum(1), g.sum(0)))) <= tol)


def conjugate_partition(partition):
    p = list(partition)
    return [sum(1 for x in p if x > j) for j in range(p[0])] if p else []


def _check_partition(partition, shape=None):
    p = [int(x) for x in partition]
    if not p or any(x <= 0 for x in p) or any(a < b for a, b in zip(p, p[1:])):
        raise ConfigError(f"partition must be positive and non-increasing, got {partition!r}")
    if shape is not None:
        l, m = shape
        if len(p) > l or p[0] > m:
            raise ConfigError(f"partition {p} does not fit a {l}x{m} grid")
    return p


def _h(counts, k):
    q = np.asarray(counts, dtype=float) / k
    return float(-np.sum(q * np.log2(q)))


def young_phi(partition, shape=None):
    """Mutual information of a uniform state on the cells of a Young diagram.

    Row ``i`` holds ``partition[i]`` cells; the value is
    ``S(p) + S(p*) - log2 k`` with ``p`` the row and ``p*`` the column profile.
    """
    p = _check_partition(partition, shape)
    k = sum(p)
    return max(0.0, _h(p, k) + _h(conjugate_partition(p), k) - math.log2(k))


def partitions_in_box(k, rows, cols, max_part=None):
    """Partitions of ``k`` with at most ``rows`` parts, each at most ``cols``."""
    max_part = cols if max_part is None else min(max_part, cols)
    if k == 0:
        yield []
        return
    if rows == 0:
        return
    for first in range(min(k, max_part), 0, -1):
        if first * rows < k:
            break
        for rest in partitions_in_box(k - first, rows - 1, cols, first):
            yield [first] + rest


def cruelest_young(k, shape):
    """``(phi, partition)`` minimizing :func:`young_phi` among diagrams of ``k`` cells."""
    l, m = check_shape(shape, min_factor=1)
    if not 1 <= k <= l * m:
        raise ConfigError(f"k={k} outside [1, {l * m}]")
    best, best_p = math.inf, None
    for p in partitions_in_box(k, l, m):
        v = young_phi(p)
        if v < best - 1e-12:
            best, best_p = v, p
    return best, best_p


def max_young_phi(shape, k_max=None):
    """Maximize over ``k`` the cruelest-diagram Phi of a rank-``k`` projection state.

    Returns ``(phi, k, partition)``.
    """
    l, m = check_shape(shape, min_factor=1)
    k_max = l * m if k_max is None else min(k_max, l * m)
    best = (-1.0, 0, None)
    for k in range(1, k_max + 1):
        v, p = cruelest_young(k, (l, m))
        if v > best[0] + 1e-12:
            best = (v, k, p)
    return best


def projection_spectrum(k, n):
    """Spectrum of ``I_k / k`` padded with zeros to length ``n``."""
    if not 1 <= k <= n:
        raise ConfigError(f"rank {k} outside [1, {n}]")
    s = np.zeros(n)
    s[:k] = 1.0 / k
    return s


def _phi_batch(spectra, shape):
    """Exhaustive Phi for each row of ``spectra`` (all rows the same length)."""
    l, m = shape
    n = l * m
    orders = _perm.enumerate_orders(np.arange(n, 0, -1, dtype=float), prune=True)
    lam = -np.sort(-np.asarray(spectra, dtype=float), axis=1)
    out = np.empty(len(lam))
    step = max(1, (1 << 18) // len(orders))
    for s in range(0, len(lam), step):
        grids = lam[s : s + step][:, orders].reshape(-1, len(orders), l, m)
        out[s : s + step] = grid_mutual_information(grids).min(axis=1)
    return np.clip(out, 0.0, None)


class MaxPhiResult(NamedTuple):
    best_phi: float
    best_spectrum: np.ndarray
    best_random_phi: float
    projection_phis: tuple


def max_phi_search(n, shape, trials, seed):
    """Score ``trials`` Dirichlet-uniform spectra and every projection spectrum.

    Non-degenerate random spectra use the pruned exhaustive search; the
    projection spectra use the degeneracy-aware search.
    """
    shape = check_shape(shape, n)
    if _perm.count_orders(np.arange(n, 0, -1.0)) > _perm.EXHAUSTIVE_CAP:
        raise ConfigError(f"n={n} too large for exhaustive scoring")
    rng = np.random.default_rng(seed)
    spectra = rng.dirichlet(np.ones(n), size=int(trials)) if trials else np.zeros((0, n))
    rand_phi = _phi_batch(spectra, shape) if trials else np.zeros(0)
    proj = tuple(quantum_phi_spectrum(projection_spectrum(k, n), shape).phi for k in range(1, n + 1))
    k_best = int(np.argmax(proj))
    best_phi, best_spec = proj[k_best], projection_spectrum(k_best + 1, n)
    best_rand = float(rand_phi.max()) if rand_phi.size else 0.0
    if rand_phi.size and best_rand > best_phi + 1e-12:
        i = int(np.argmax(rand_phi))
        best_phi, best_spec = best_rand, np.sort(spectra[i])[::-1]
    return MaxPhiResult(float(best_phi), best_spec, best_rand, proj)
