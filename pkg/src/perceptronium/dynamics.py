"""Equispaced model system, apodized wave packets and reduced-dynamics formulas.

Conventions: states evolve as ``rho(t) = e^{iHt} rho e^{-iHt}`` (so
``d rho/dt = i[H, rho]``) with hbar = 1, and the subsystem of interest is
the first tensor factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from ._validation import (
    ConfigError,
    NotSeparableError,
    ShapeError,
    check_density_matrix,
    check_hermitian,
    check_shape,
    check_square,
)
from .hilbert import commutator, hs_projectors, ptrace

__all__ = [
    "EquispacedSystem",
    "equispaced_system",
    "overlap_fn",
    "overlap_direct",
    "apodization_coefficients",
    "apodized_state",
    "ToeplitzResult",
    "toeplitz_optimal_state",
    "penalty_objective",
    "subsystem_hamiltonians",
    "effective_interaction",
    "k_term",
    "rho1_dot",
    "rho1_ddot",
    "slin_first_derivative",
    "slin_second_derivative",
    "product_factors",
    "fidelity",
]


@dataclass(frozen=True)
class EquispacedSystem:
    """``n`` levels ``E_k = (k - (n-1)/2) omega`` with a conjugate position basis.

    ``fourier[j, k] = exp(2 pi i E_j k / (n omega)) / sqrt(n)``; column ``k`` is
    the position eigenstate ``|x_k>`` written in the energy basis, and
    ``position_op = F h F^dagger``.
    """

    n: int
    omega: float
    energies: np.ndarray
    h: np.ndarray
    fourier: np.ndarray
    position_op: np.ndarray

    def position_eigenstate(self, k=0):
        return self.fourier[:, k % self.n].copy()

    def potential(self, values):
        """``V(x) = F diag(values) F^dagger`` for ``values[j] = V(E_j / omega)``."""
        f = self.fourier
        return (f * np.asarray(values)[None, :]) @ f.conj().T

    @property
    def period(self):
        return 2 * np.pi / self.omega


def equispaced_system(n, omega=1.0):
    if n < 2:
        raise ConfigError("n must be at least 2")
    e = np.arange(n) - (n - 1) / 2
    f = np.exp(2j * np.pi * np.outer(e, np.arange(n)) / n) / np.sqrt(n)
    h = np.diag(e * omega).astype(complex)
    x = f @ h @ f.conj().T
    return EquispacedSystem(n, float(omega), e * omega, h, f, (x + x.conj().T) / 2)


def overlap_fn(n, phi):
    """``<x_k| e^{iH phi/omega} |x_k>`` for the equispaced system: ``sin(n phi/2) / (n sin(phi/2))``.

    Phases are reduced to ``[-pi, pi)`` first; each ``2 pi`` shift contributes
    a factor ``(-1)^(n-1)``.
    """
    phi = np.asarray(phi, dtype=float)
    q = np.round(phi / (2 * np.pi))
    r = phi - 2 * np.pi * q
    sign = np.where((q.astype(np.int64) * (n - 1)) % 2 == 0, 1.0, -1.0)
    s = np.sin(r / 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.where(s == 0, 1.0, np.sin(n * r / 2) / (n * np.where(s == 0, 1.0, s)))
    out = sign * f
    return float(out) if out.ndim == 0 else out


def overlap_direct(n, phi):
    """``(1/n) sum_k e^{i E_k phi}`` evaluated term by term (real up to rounding)."""
    e = np.arange(n) - (n - 1) / 2
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    return np.exp(1j * np.outer(phi, e)).mean(axis=1)


_TRUNC = 1e-12


def _closed_form(alpha, k):
    k = np.asarray(k, dtype=float)
    sgn = np.where(np.abs(k) % 2 == 0, 1.0, -1.0)
    if alpha == 0:
        return (k == 0).astype(float)
    if alpha == 1:
        return sgn / (1 - 4 * k**2)
    if alpha == 2:
        return (k == 0) + 0.5 * (np.abs(k) == 1)
    if alpha == 3:
        return sgn / ((1 - 4 * k**2) * (1 - 4 * k**2 / 9))
    if alpha == 4:
        return (k == 0) + (2 / 3) * (np.abs(k) == 1) + (1 / 6) * (np.abs(k) == 2)
    raise ValueError(alpha)


def _support(alpha):
    """Half-width beyond which closed-form coefficients fall below the truncation level."""
    if alpha in (0, 2, 4):
        return alpha // 2
    if alpha == 1:
        return int(np.ceil(np.sqrt(1 / (4 * _TRUNC)))) + 1
    return int(np.ceil((9 / (16 * _TRUNC)) ** 0.25)) + 1


def apodization_coefficients(alpha):
    """Position-space coefficients ``(k, psi_k)`` of the order-``alpha`` apodized packet.

    Orders 0 to 4 use closed forms; higher orders convolve the order-3 or
    order-4 sequence with the order-2 kernel ``(1/2, 1, 1/2)``. Coefficients
    with ``|psi_k| < 1e-12 * max|psi|`` are dropped. Not normalized.
    """
    alpha = int(alpha)
    if not 0 <= alpha <= 8:
        raise ConfigError(f"alpha must be in [0, 8], got {alpha}")
    base = alpha if alpha <= 4 else 3 + (alpha - 3) % 2
    half = _support(base)
    k = np.arange(-half, half + 1)
    c = _closed_form(base, k)
    kernel = np.array([0.5, 1.0, 0.5])
    for _ in range((alpha - base) // 2):
        c = np.convolve(c, kernel)
        half += 1
        k = np.arange(-half, half + 1)
    keep = np.abs(c) >= _TRUNC * np.abs(c).max()
    return k[keep], c[keep]


def apodized_state(alpha, n, exact=False):
    """Unit-norm apodized packet centred on ``|x_0>``, returned in the energy basis.

    With ``exact=False`` the truncated position coefficients are folded onto
    the ``n`` sites and transformed with the system's Fourier matrix. With
    ``exact=True`` the infinite sum is evaluated in closed form: energy
    amplitudes proportional to ``cos(pi E_j / n)^alpha``.
    """
    alpha = int(alpha)
    if not 0 <= alpha <= 8:
        raise ConfigError(f"alpha must be in [0, 8], got {alpha}")
    e = np.arange(n) - (n - 1) / 2
    if exact:
        amp = np.cos(np.pi * e / n) ** alpha + 0j
    else:
        k, c = apodization_coefficients(alpha)
        site = np.mod(k, n)
        wraps = np.floor_divide(k, n)
        sign = np.where((wraps * (n - 1)) % 2 == 0, 1.0, -1.0)
        pos = np.bincount(site, weights=c * sign, minlength=n)
        amp = np.exp(2j * np.pi * np.outer(e, np.arange(n)) / n) @ pos
    return amp / np.linalg.norm(amp)


class ToeplitzResult(NamedTuple):
    state: np.ndarray
    value: float
    degenerate: bool
    psd: bool


def _toeplitz(n, coeffs):
    c = np.zeros(n)
    w = np.asarray(coeffs, dtype=float).ravel()
    c[: min(n, w.size)] = w[:n]
    return 2 * np.pi * scipy.linalg.toeplitz(c)


def toeplitz_optimal_state(n, penalty_coeffs, tol=1e-10):
    """Energy amplitudes minimizing ``int |g(theta)|^2 w(theta) d theta``.

    ``penalty_coeffs[k]`` is the ``k``-th Fourier coefficient of the real even
    penalty ``w(theta) = sum_k w_k e^{i k theta}``. The quadratic form is
    ``2 pi`` times the symmetric Toeplitz matrix of these coefficients; its
    lowest eigenvector is returned. ``degenerate`` flags a repeated lowest
    eigenvalue and ``psd=False`` flags a form that goes negative.
    """
    if n < 4:
        raise ConfigError("n must be at least 4")
    t = _toeplitz(n, penalty_coeffs)
    lam, vec = np.linalg.eigh(t)
    scale = max(1.0, float(np.abs(lam).max()))
    v = vec[:, 0]
    v = v * np.sign(v[np.argmax(np.abs(v))])
    degenerate = bool(lam[1] - lam[0] <= tol * scale)
    return ToeplitzResult(v + 0j, float(lam[0]), degenerate, bool(lam[0] >= -tol * scale))


def penalty_objective(amplitudes, penalty, points=4096):
    """Periodic-trapezoid quadrature of ``int_{-pi}^{pi} |sum_j a_j e^{ij theta}|^2 w(theta)``."""
    a = np.asarray(amplitudes)
    theta = -np.pi + 2 * np.pi * np.arange(points) / points
    g = np.exp(1j * np.outer(theta, np.arange(a.size))) @ a
    return float(np.sum(np.abs(g) ** 2 * penalty(theta)) * 2 * np.pi / points)


def subsystem_hamiltonians(h, shape):
    """``(H1, H2, H3)``: traceless subsystem Hamiltonians (``l x l`` and ``m x m``) and the full interaction."""
    h = check_hermitian(h, "h")
    shape = check_shape(shape, h.shape[0])
    l, m = shape
    t = np.trace(h) / (l * m)
    h1 = ptrace(h, shape, "second") / m - t * np.eye(l)
    h2 = ptrace(h, shape, "first") / l - t * np.eye(m)
    return h1, h2, hs_projectors(h, shape)[3]


def effective_interaction(h3, rho2, shape):
    """``H* = tr_2[(I (x) rho2) H3]``."""
    h3 = check_square(h3, "h3")
    shape = check_shape(shape, h3.shape[0])
    rho2 = check_square(rho2, "rho2")
    if rho2.shape[0] != shape.m:
        raise ShapeError(f"rho2 must be {shape.m}x{shape.m}")
    return ptrace(np.kron(np.eye(shape.l), rho2) @ h3, shape, "second")


def k_term(h3, h2, rho2, shape):
    """``K = i tr_2[(I (x) [H2, rho2]) H3]``."""
    shape = check_shape(shape, np.shape(h3)[0])
    c = commutator(h2, rho2)
    return 1j * ptrace(np.kron(np.eye(shape.l), c) @ h3, shape, "second")


def rho1_dot(h, rho1, rho2, shape):
    """First-order reduced dynamics ``i[H1 + H*, rho1]`` for a product initial state."""
    h1, _, h3 = subsystem_hamiltonians(h, shape)
    hs = effective_interaction(h3, rho2, shape)
    return 1j * commutator(h1 + hs, rho1)


def rho1_ddot(h, rho1, rho2, shape):
    """Second time derivative of the reduced state at a product initial state."""
    shape = check_shape(shape, np.shape(h)[0])
    h1, h2, h3 = subsystem_hamiltonians(h, shape)
    hs = effective_interaction(h3, rho2, shape)
    k = k_term(h3, h2, rho2, shape)
    rho = np.kron(rho1, rho2)
    c = commutator
    minus = (
        c(h1, c(h1, rho1))
        - 1j * c(k, rho1)
        + c(h1, c(hs, rho1))
        + c(hs, c(h1, rho1))
        + ptrace(c(h3, c(h3, rho)), shape, "second")
    )
    return -minus


def slin_first_derivative(rho1, rho2, h, shape):
    """``d/dt (1 - tr rho1^2)`` at a product state; zero by construction."""
    r1d = rho1_dot(h, rho1, rho2, shape)
    return float(-2 * np.vdot(rho1, r1d).real)


def slin_second_derivative(rho1, rho2, h, shape):
    """``2 tr(rho1 tr_2[H3, [H3, rho]]) - 2 ||[H*, rho1]||^2`` at ``rho = rho1 (x) rho2``.

    Depends only on the interaction part of ``h``.
    """
    rho1 = check_density_matrix(rho1, "rho1")
    rho2 = check_density_matrix(rho2, "rho2")
    h = check_hermitian(h, "h")
    shape = check_shape(shape, h.shape[0])
    if rho1.shape[0] != shape.l or rho2.shape[0] != shape.m:
        raise ShapeError("reduced states do not match shape")
    h3 = hs_projectors(h, shape)[3]
    hs = effective_interaction(h3, rho2, shape)
    rho = np.kron(rho1, rho2)
    dd = ptrace(commutator(h3, commutator(h3, rho)), shape, "second")
    first = 2 * np.vdot(rho1, dd).real
    second = 2 * np.linalg.norm(commutator(hs, rho1)) ** 2
    return float(first - second)


def product_factors(rho, shape, tol=1e-10):
    """Return ``(rho1, rho2)`` if ``rho = rho1 (x) rho2``, else raise :class:`NotSeparableError`."""
    rho = check_density_matrix(rho)
    shape = check_shape(shape, rho.shape[0])
    r1 = ptrace(rho, shape, "second")
    r2 = ptrace(rho, shape, "first")
    if np.max(np.abs(np.kron(r1, r2) - rho)) > tol:
        raise NotSeparableError("state is not a product of its marginals")
    return r1, r2


def fidelity(psi0, h, t):
    """``|<psi0| e^{iHt} |psi0>|``."""
    h = check_hermitian(h, "h")
    psi0 = np.asarray(psi0, dtype=complex)
    e, v = np.linalg.eigh(h)
    c = v.conj().T @ psi0
    return float(abs(np.sum(np.abs(c) ** 2 * np.exp(1j * e * t))))
