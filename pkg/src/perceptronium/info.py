"""Entropies, mutual information and energy-coherence measures (bits throughout)."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ._validation import (
    EIG_CLAMP,
    InvalidStateError,
    check_density_matrix,
    check_hermitian,
    check_probability_vector,
    check_same_dim,
    check_shape,
    check_square,
)
from .hilbert import commutator, ptrace

__all__ = [
    "InfoReport",
    "shannon_entropy",
    "von_neumann_entropy",
    "mutual_information",
    "grid_mutual_information",
    "linear_entropy",
    "spectral_density",
    "energy_coherence",
    "probability_velocity",
    "max_velocity_basis",
    "clamp_spectrum",
]


@dataclass(frozen=True)
class InfoReport:
    s_total: float
    s_first: float
    s_second: float
    mutual_info: float

    def to_dict(self):
        return asdict(self)


def _h(p):
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def shannon_entropy(p):
    """``-sum p log2 p`` with ``0 log 0 = 0``."""
    return max(0.0, _h(check_probability_vector(p)))


def clamp_spectrum(lam):
    """Clamp eigenvalues in ``[-1e-10, 0)`` to zero; raise below that."""
    lam = np.asarray(lam, dtype=float)
    if lam.size and lam.min() < -EIG_CLAMP:
        raise InvalidStateError(f"eigenvalue {lam.min():.3e} below -{EIG_CLAMP:g}")
    return np.clip(lam, 0.0, None)


def _vn(rho):
    lam = clamp_spectrum(np.linalg.eigvalsh(rho))
    return max(0.0, _h(lam / lam.sum()))


def von_neumann_entropy(rho):
    """``-tr rho log2 rho`` from the eigenvalues of ``rho``."""
    return _vn(check_density_matrix(rho))


def mutual_information(rho, shape):
    """``S(rho_1) + S(rho_2) - S(rho)`` across the bipartition ``shape``."""
    rho = check_density_matrix(rho)
    shape = check_shape(shape, rho.shape[0])
    s = _vn(rho)
    s1 = _vn(ptrace(rho, shape, "second"))
    s2 = _vn(ptrace(rho, shape, "first"))
    return InfoReport(s, s1, s2, s1 + s2 - s)


def grid_mutual_information(grid):
    """Mutual information of a diagonal state given as an ``l x m`` probability grid.

    Accepts a stack of grids with shape ``(..., l, m)`` and returns an array.
    """
    g = np.clip(np.asarray(grid, dtype=float), 0.0, None)

    def ent(x, axes):
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(x > 0, x * np.log2(np.where(x > 0, x, 1.0)), 0.0)
        return -t.sum(axis=axes)

    rows = g.sum(axis=-1)
    cols = g.sum(axis=-2)
    return ent(rows, -1) + ent(cols, -1) - ent(g, (-2, -1))


def linear_entropy(rho):
    """``1 - tr rho^2``."""
    rho = check_density_matrix(rho)
    return float(1.0 - np.vdot(rho, rho).real)


def spectral_density(rho, h):
    """Energy-basis populations ``p_n = <E_n|rho|E_n>``, ordered by ascending energy."""
    rho = check_density_matrix(rho)
    h = check_hermitian(h, "h")
    check_same_dim(rho, h)
    _, v = np.linalg.eigh(h)
    p = np.einsum("ij,ik,kj->j", v.conj(), rho, v).real
    return np.clip(p, 0.0, None)


def energy_coherence(rho, h):
    """``sqrt(tr[H^2 rho^2 - H rho H rho])``, equal to ``||i[H, rho]|| / sqrt(2)``."""
    rho = check_square(rho, "rho")
    h = check_hermitian(h, "h")
    check_same_dim(rho, h)
    hr = h @ rho
    rh = rho @ h
    h2r2 = np.sum(hr * rh.T).real  # tr(H rho rho H) = tr(H^2 rho^2)
    hrhr = np.sum(hr * hr.T).real
    return float(np.sqrt(max(0.0, h2r2 - hrhr)))


def probability_velocity(rho, h, basis):
    """Speed ``sqrt(sum_k (d/dt rho_kk)^2)`` of basis-state probabilities.

    ``basis`` is a unitary whose columns are the basis vectors.
    """
    rho = check_square(rho, "rho")
    h = check_hermitian(h, "h")
    u = check_square(basis, "basis")
    check_same_dim(rho, h, u)
    rdot = 1j * commutator(h, rho)
    v = np.einsum("ij,ik,kj->j", u.conj(), rdot, u).real
    return float(np.linalg.norm(v))


def max_velocity_basis(rho, h):
    """Eigenbasis of ``i[H, rho]``, in which the probability velocity is maximal."""
    h = check_hermitian(h, "h")
    rdot = 1j * commutator(h, check_square(rho, "rho"))
    _, v = np.linalg.eigh((rdot + rdot.conj().T) / 2)
    return v
