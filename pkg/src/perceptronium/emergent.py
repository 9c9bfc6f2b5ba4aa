"""Harmonic oscillator as uncoupled qubits, and dispersion of a coupled oscillator lattice.

Qubit ``j`` carries weight ``2^j``; the most significant qubit is the
leftmost Kronecker factor. Spin up is ``(1, 0)``, spin down ``(0, 1)``.
"""

from __future__ import annotations

import itertools

import numpy as np

from ._validation import ConfigError, TachyonicModeError

__all__ = [
    "SIGMA_Z",
    "SIGMA_RAISE",
    "qubit_oscillator",
    "qubit_eigenstate",
    "nearest_neighbor_couplings",
    "lattice_dispersion",
    "nearest_neighbor_dispersion",
    "coupling_matrix",
    "dft3",
    "lattice_normal_modes",
    "dispersion_grid",
]

SIGMA_Z = np.diag([1.0, -1.0])
SIGMA_RAISE = np.array([[0.0, 1.0], [0.0, 0.0]])
_DOWN = np.array([0.0, 1.0])


def qubit_oscillator(b):
    """``H = sum_j 2^(j-1) sz_j`` on ``b`` qubits (real diagonal matrix).

    The diagonal runs from ``+(2^b - 1)/2`` (all up) down to ``-(2^b - 1)/2``.
    """
    if not 1 <= b <= 12:
        raise ConfigError(f"b must be in [1, 12], got {b}")
    n = 1 << b
    h = np.zeros((n, n))
    for j in range(b):
        left = np.eye(1 << (b - 1 - j))
        right = np.eye(1 << j)
        h += 2.0 ** (j - 1) * np.kron(np.kron(left, SIGMA_Z), right)
    return h


def qubit_eigenstate(b, k):
    """``|E_k> = (x)_j (sigma^dagger)^(k_j) |down>``, most significant qubit first."""
    if not 0 <= k < 1 << b:
        raise ConfigError(f"k must be in [0, 2^{b})")
    vec = np.ones(1)
    for j in reversed(range(b)):
        q = SIGMA_RAISE @ _DOWN if (k >> j) & 1 else _DOWN
        vec = np.kron(vec, q)
    return vec


def nearest_neighbor_couplings(mu, gamma, mu_squared=None):
    """Self-coupling ``mu^2 + 6 gamma^2`` and ``-gamma^2`` to each of six neighbours.

    ``mu_squared`` overrides ``mu**2`` and may be negative.
    """
    m2 = mu**2 if mu_squared is None else mu_squared
    c = {(0, 0, 0): m2 + 6 * gamma**2}
    for axis in range(3):
        for s in (1, -1):
            r = [0, 0, 0]
            r[axis] = s
            c[tuple(r)] = -(gamma**2)
    return c


def _check_symmetric(couplings, tol=1e-12):
    for r, a in couplings.items():
        neg = tuple(-x for x in r)
        if abs(couplings.get(neg, 0.0) - a) > tol * max(1.0, abs(a)):
            raise ConfigError(f"couplings not symmetric at offset {r}")


def lattice_dispersion(couplings, kappa):
    """``omega^2 = sum_r a_r e^{-i kappa . r}`` for symmetric couplings."""
    _check_symmetric(couplings)
    kappa = np.asarray(kappa, dtype=float)
    total = sum(a * np.exp(-1j * np.dot(kappa, r)) for r, a in couplings.items())
    scale = max(1.0, sum(abs(a) for a in couplings.values()))
    if abs(total.imag) > 1e-12 * scale:
        raise ConfigError("dispersion has an imaginary part")
    return float(total.real)


def nearest_neighbor_dispersion(mu, gamma, kappa):
    kappa = np.asarray(kappa, dtype=float)
    return float(mu**2 + 4 * gamma**2 * np.sum(np.sin(kappa / 2) ** 2))


def _site(r, side):
    x, y, z = (c % side for c in r)
    return (x * side + y) * side + z


def coupling_matrix(side, couplings):
    """Circulant ``A[r, r'] = a_{r' - r}`` on the periodic ``side^3`` lattice."""
    n = side**3
    a = np.zeros((n, n))
    for r in itertools.product(range(side), repeat=3):
        i = _site(r, side)
        for off, val in couplings.items():
            a[i, _site(tuple(r[d] + off[d] for d in range(3)), side)] += val
    return a


def dft3(side):
    """Unitary 3-D DFT with ``F[r, q] = exp(2 pi i q . r / side) / side^(3/2)``."""
    f1 = np.exp(2j * np.pi * np.outer(np.arange(side), np.arange(side)) / side) / np.sqrt(side)
    return np.kron(np.kron(f1, f1), f1)


def lattice_normal_modes(side, mu, gamma, mu_squared=None):
    """Sorted normal-mode frequencies ``sqrt(eig(A))`` of the periodic lattice."""
    if not 1 <= side <= 8:
        raise ConfigError(f"side must be in [1, 8], got {side}")
    a = coupling_matrix(side, nearest_neighbor_couplings(mu, gamma, mu_squared))
    w2 = np.linalg.eigvalsh(a)
    if w2[0] < -1e-12 * max(1.0, abs(w2).max()):
        raise TachyonicModeError(f"negative squared frequency {w2[0]:.3e}")
    return np.sqrt(np.clip(w2, 0.0, None))


def dispersion_grid(side, mu, gamma):
    """Rows ``(kx, ky, kz, omega^2)`` over the ``side^3`` lattice wave vectors ``2 pi q / side``."""
    couplings = nearest_neighbor_couplings(mu, gamma)
    rows = []
    for q in itertools.product(range(side), repeat=3):
        kappa = 2 * np.pi * np.asarray(q) / side
        rows.append((*kappa, lattice_dispersion(couplings, kappa)))
    return rows
