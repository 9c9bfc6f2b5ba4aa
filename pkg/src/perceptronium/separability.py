"""Hamiltonian separability: integration energy, optimality and frozen subspaces."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from . import _perm
from ._validation import ConfigError, InvalidStateError, check_density_matrix, check_hermitian, check_same_dim, check_shape
from .hilbert import commutator, diag_projectors, hs_projectors, ptrace

__all__ = [
    "SeparabilityReport",
    "integration_energy",
    "h3_norm_grids",
    "optimal_basis",
    "stationarity_residual",
    "majorizes",
    "majorization_check",
    "lemma1_rotate",
    "FrozenSubspace",
    "freeze_subspace",
    "separable_completion",
]

STATIONARITY_EPS = 1e-15
SEPARABLE_TOL = 1e-12
FREEZE_FLOOR = 1e-12


@dataclass(frozen=True)
class SeparabilityReport:
    norms: tuple
    integration_energy: float
    permutation: tuple
    certified: bool = True
    eigenvalues: tuple = field(default=(), repr=False)

    def to_json(self):
        d = {
            "norms": [float(x) for x in self.norms],
            "integration_energy": float(self.integration_energy),
            "permutation": [int(x) for x in self.permutation],
        }
        return json.dumps(d)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        return cls(tuple(d["norms"]), float(d["integration_energy"]), tuple(d["permutation"]))

    def to_dict(self):
        return asdict(self)


def h3_norm_grids(grids):
    """``||P_l G P_m||`` for a stack of ``l x m`` energy grids."""
    g = np.asarray(grids, dtype=float)
    g = g - g.mean(axis=-1, keepdims=True)
    g = g - g.mean(axis=-2, keepdims=True)
    return np.sqrt(np.sum(g * g, axis=(-2, -1)))


def integration_energy(h, shape, mode="auto", seed=0):
    """Minimum of ``||H3||`` over all factorizations, found in the energy eigenbasis.

    ``permutation[c]`` indexes the descending-sorted spectrum placed at
    grid cell ``c`` (rows = first factor).
    """
    h = check_hermitian(h, "h")
    shape = check_shape(shape, h.shape[0])
    lam = np.sort(np.linalg.eigvalsh(h))[::-1]
    val, order, cert = _perm.search(lam, shape, h3_norm_grids, mode=mode, seed=seed)
    comps = diag_projectors(lam[order], shape)
    norms = tuple(float(np.linalg.norm(c)) for c in comps)
    return SeparabilityReport(norms, float(norms[3]), tuple(int(i) for i in order), cert, tuple(lam))


def optimal_basis(h, shape, mode="auto", seed=0):
    """Unitary ``V`` with ``V^dagger h V`` diagonal and maximally separable."""
    h = check_hermitian(h, "h")
    lam, vec = np.linalg.eigh(h)
    rep = integration_energy(h, shape, mode=mode, seed=seed)
    return vec[:, ::-1][:, list(rep.permutation)], rep


def _generators(n):
    """Orthonormal basis of the ``n^2``-dimensional anti-Hermitian matrices."""
    s = 1 / np.sqrt(2)
    for j in range(n):
        a = np.zeros((n, n), complex)
        a[j, j] = 1j
        yield a
    for j in range(n):
        for k in range(j + 1, n):
            a = np.zeros((n, n), complex)
            a[j, k], a[k, j] = 1j * s, 1j * s
            yield a
            b = np.zeros((n, n), complex)
            b[j, k], b[k, j] = s, -s
            yield b


def stationarity_residual(h, shape):
    """``max_A |(Pi3 h, [A, h])| / (||Pi3 h|| ||h|| + eps)`` over a generator basis."""
    h = check_hermitian(h, "h")
    shape = check_shape(shape, h.shape[0])
    h3 = hs_projectors(h, shape)[3]
    if np.linalg.norm(h3) <= SEPARABLE_TOL * np.linalg.norm(h):
        return 0.0  # separable up to roundoff; the ratio below would be noise/noise
    denom = np.linalg.norm(h3) * np.linalg.norm(h) + STATIONARITY_EPS
    worst = 0.0
    for a in _generators(h.shape[0]):
        worst = max(worst, abs(np.vdot(h3, commutator(a, h))))
    return float(worst / denom)


def majorizes(x, y, tol=1e-10):
    """True iff ``x`` majorizes ``y``: descending prefix sums dominate, totals equal."""
    x = np.sort(np.asarray(x, float))[::-1]
    y = np.sort(np.asarray(y, float))[::-1]
    if x.shape != y.shape:
        raise ValueError("vectors must have equal length")
    cx, cy = np.cumsum(x), np.cumsum(y)
    scale = max(1.0, float(np.abs(x).sum()))
    return bool(np.all(cx >= cy - tol * scale) and abs(cx[-1] - cy[-1]) <= tol * scale)


def majorization_check(h):
    """True iff the spectrum of ``h`` majorizes its diagonal (shifted to PSD)."""
    h = check_hermitian(h, "h")
    lam = np.linalg.eigvalsh(h)
    shift = min(0.0, float(lam[0]))
    return majorizes(lam - shift, np.diag(h).real - shift)


def lemma1_rotate(h, shape):
    """Rotate by ``U1 (x) U2`` diagonalizing both reduced operators, then drop off-diagonals.

    Returns ``(h_diag, u)`` where ``u = U1 (x) U2``; the partial traces of
    ``h_diag`` have the same spectra as those of ``h``.
    """
    h = check_hermitian(h, "h")
    shape = check_shape(shape, h.shape[0])
    _, u1 = np.linalg.eigh(ptrace(h, shape, "second"))
    _, u2 = np.linalg.eigh(ptrace(h, shape, "first"))
    u = np.kron(u1, u2)
    hr = u.conj().T @ h @ u
    return np.diag(np.diag(hr)), u


class FrozenSubspace(NamedTuple):
    projector: np.ndarray
    h_eff: np.ndarray
    rho_eff: np.ndarray
    basis: np.ndarray
    energies: np.ndarray


def freeze_subspace(rho, h, threshold):
    """Restrict to energy eigenstates with spectral density above ``threshold``.

    Populations at or below ``1e-12`` count as zero whatever the threshold.
    ``basis`` is the ``n x d`` isometry onto the retained eigenvectors;
    ``h_eff`` and ``rho_eff`` are ``d x d`` in that basis.
    """
    if not 0.0 <= threshold < 1.0:
        raise ConfigError(f"threshold must lie in [0, 1), got {threshold}")
    rho = check_density_matrix(rho)
    h = check_hermitian(h, "h")
    check_same_dim(rho, h)
    e, v = np.linalg.eigh(h)
    p = np.einsum("ij,ik,kj->j", v.conj(), rho, v).real
    keep = np.flatnonzero(p > max(threshold, FREEZE_FLOOR))
    if keep.size == 0:
        raise InvalidStateError(f"no energy eigenstate has spectral density above {threshold}")
    w = v[:, keep]
    return FrozenSubspace(w @ w.conj().T, np.diag(e[keep]).astype(complex), w.conj().T @ rho @ w, w, e[keep])


def separable_completion(energies, shape):
    """Fill an ``l x m`` grid additively from ``l + m - 1`` retained energies.

    Cell ``(0, 0)`` gets ``energies[0]``, the rest of row 0 gets
    ``energies[1:m]`` and the rest of column 0 gets ``energies[m:]``; every
    other cell is ``row[i] + col[j] - energies[0]``, so the grid has zero
    interaction component. Returns the grid.
    """
    l, m = check_shape(shape)
    e = np.asarray(energies, dtype=float)
    if e.size != l + m - 1:
        raise ConfigError(f"need {l + m - 1} energies for a {l}x{m} grid, got {e.size}")
    row = np.concatenate([[e[0]], e[1:m]])
    col = np.concatenate([[e[0]], e[m:]])
    return col[:, None] + row[None, :] - e[0]
