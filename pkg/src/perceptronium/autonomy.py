"""Sliding-diagonal decoherence simulation, autonomy scaling and state factorization."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from ._validation import ConfigError, InvalidStateError, check_density_matrix, check_hermitian, check_shape
from .dynamics import apodized_state, equispaced_system, slin_second_derivative
from .hilbert import evolve_many, random_hermitian, random_pure
from .info import energy_coherence, von_neumann_entropy

__all__ = [
    "AutonomyReport",
    "sliding_potential",
    "sliding_hamiltonian",
    "sliding_simulation",
    "SnipResult",
    "snip_objective",
    "factorization_optimize",
    "random_snip_instance",
    "DEFAULT_SNIP_TIMES",
]

POTENTIALS = ("sinusoidal", "gaussian")


@dataclass(frozen=True)
class AutonomyReport:
    """Timescales of one sliding run.

    ``tau_ind`` uses the orbit-averaged curvature ``2 S(T) / T^2`` in place
    of ``S''(0)``, which vanishes for a position eigenstate;
    ``slin_ddot0`` carries the instantaneous value.
    """

    b: int
    alpha: int
    potential: str
    delta_h: float
    tau_dyn: float
    tau_ind: float
    autonomy: float
    slin_T: float
    slin_ddot0: float
    times: np.ndarray = field(repr=False)
    slin_curve: np.ndarray = field(repr=False)


def sliding_potential(n, potential):
    """Diagonal values ``V(x_k)`` on the position grid ``x = E / omega``."""
    x = np.arange(n) - (n - 1) / 2
    if potential == "sinusoidal":
        return np.sin(2 * np.pi * x / n)
    if potential == "gaussian":
        g = np.exp(4 * np.cos(2 * np.pi * x / n))
        return g / g.max()  # peak normalized on the sampled grid
    raise ConfigError(f"potential must be one of {POTENTIALS}, got {potential!r}")


def sliding_hamiltonian(b, potential="sinusoidal", omega2=1.0, coupling=1.0):
    """``H = H_sys (x) I + omega2 I (x) sx + coupling V(x) (x) sx`` on ``2^b x 2`` levels."""
    sysm = equispaced_system(2**b)
    v = sysm.potential(sliding_potential(sysm.n, potential))
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    h = np.kron(sysm.h, np.eye(2)) + omega2 * np.kron(np.eye(sysm.n), sx) + coupling * np.kron(v, sx)
    return (h + h.conj().T) / 2, sysm, v


def _lagrange_slin(a, b):
    """``(||a||^2 ||b||^2 - |<a, b>|^2) / 2`` computed without cancellation."""
    outer = np.outer(a, b)
    return 0.25 * float(np.sum(np.abs(outer - outer.T) ** 2))


def sliding_simulation(b, potential="sinusoidal", alpha=0, omega2=1.0, coupling=1.0, samples=33, ddot0=True):
    """Evolve an apodized packet coupled to one environment qubit over one orbit.

    The environment starts in ``|up>``. Because every term commutes with
    ``I (x) sx``, the state splits into two branches evolving under
    ``H_sys +/- (omega2 + coupling V)``; the subsystem linear entropy is
    ``(1 - |<phi_+|phi_->|^2) / 2``, evaluated through the Lagrange
    identity to keep tiny values accurate.
    """
    if not 2 <= b <= 10:
        raise ConfigError(f"b must be in [2, 10], got {b}")
    if samples < 2:
        raise ConfigError("need at least two time samples")
    sysm = equispaced_system(2**b)
    n = sysm.n
    v = sysm.potential(sliding_potential(n, potential))
    psi = apodized_state(alpha, n, exact=True)
    period = sysm.period
    times = np.linspace(0.0, period, samples)
    branches = []
    for s in (1.0, -1.0):
        hb = sysm.h + s * (omega2 * np.eye(n) + coupling * v)
        e, w = np.linalg.eigh((hb + hb.conj().T) / 2)
        c = w.conj().T @ psi
        branches.append((e, w, c))
    curve = np.empty(samples)
    for i, t in enumerate(times):
        phis = [w @ (np.exp(1j * e * t) * c) for e, w, c in branches]
        curve[i] = _lagrange_slin(phis[0], phis[1])
    rho1 = np.outer(psi, psi.conj())
    delta_h = energy_coherence(rho1, sysm.h)
    slin_t = float(curve[-1])
    if ddot0:
        h, _, _ = sliding_hamiltonian(b, potential, omega2, coupling)
        rho2 = np.array([[1, 0], [0, 0]], dtype=complex)
        s0 = slin_second_derivative(rho1, rho2, h, (n, 2))
    else:
        s0 = float("nan")
    tau_dyn = 1.0 / delta_h
    tau_ind = period / np.sqrt(2 * slin_t) if slin_t > 0 else float("inf")
    return AutonomyReport(
        b, int(alpha), potential, float(delta_h), float(tau_dyn), float(tau_ind),
        float(tau_ind / tau_dyn), slin_t, float(s0), times, curve,
    )


DEFAULT_SNIP_TIMES = tuple(np.linspace(0.0, 1.0, 9))


def _herm_from_params(theta, n):
    k = np.zeros((n, n), dtype=complex)
    iu = np.triu_indices(n, 1)
    m = len(iu[0])
    k[np.diag_indices(n)] = theta[:n]
    k[iu] = theta[n : n + m] + 1j * theta[n + m :]
    return k + np.triu(k, 1).conj().T


def _unitary(theta, n):
    e, v = np.linalg.eigh(_herm_from_params(theta, n))
    return (v * np.exp(1j * e)) @ v.conj().T


def _reduced_batch(u, rhos, shape):
    l, m = shape
    rot = np.einsum("ij,tjk,lk->til", u, rhos, u.conj())
    return np.einsum("tkikj->tij", rot.reshape(-1, l, m, l, m))


def snip_objective(u, rhos, shape):
    """``1 - mean_i ||tr_1(U rho_i U^dagger)||^2``."""
    red = _reduced_batch(u, np.asarray(rhos), shape)
    return float(1.0 - np.mean(np.sum(np.abs(red) ** 2, axis=(1, 2))))


def _mean_entropy(u, rhos, shape):
    out = []
    for red in _reduced_batch(u, np.asarray(rhos), shape):
        red = (red + red.conj().T) / 2
        out.append(von_neumann_entropy(red / np.trace(red).real))
    return float(np.mean(out))


class SnipResult(NamedTuple):
    u: np.ndarray
    objective: float
    converged: bool
    entropy_before: float
    entropy_after: float
    restart: int
    trace: tuple


def random_snip_instance(seed, n=4):
    """Random Hamiltonian and pure state from ``numpy.random.default_rng(seed)``."""
    rng = np.random.default_rng(seed)
    h = random_hermitian(n, rng)
    psi = random_pure(n, rng)
    return h, np.outer(psi, psi.conj())


def factorization_optimize(rho0, h, times=DEFAULT_SNIP_TIMES, budget=400, seed=0, restarts=8, shape=(2, 2)):
    """Find the factorization ``U`` keeping the evolved state closest to a product.

    BFGS with finite-difference gradients over the ``n^2`` real parameters of
    a Hermitian generator ``K`` (``U = e^{iK}``). Restart 0 starts from the
    identity, the others from Gaussian parameters drawn from
    ``default_rng(seed)``. The best restart is the lowest objective, ties to
    the lowest index. ``trace`` lists the objective after each accepted step
    of that restart.
    """
    rho0 = check_density_matrix(rho0, "rho0")
    h = check_hermitian(h, "h")
    shape = check_shape(shape, h.shape[0])
    if abs(np.trace(rho0 @ rho0).real - 1) > 1e-9:
        raise InvalidStateError("rho0 must be pure")
    if budget < 1 or restarts < 1:
        raise ConfigError("budget and restarts must be positive")
    n = h.shape[0]
    rhos = evolve_many(rho0, h, times)
    rng = np.random.default_rng(seed)

    def f(theta):
        return snip_objective(_unitary(theta, n), rhos, shape)

    best = None
    for r in range(restarts):
        x0 = np.zeros(n * n) if r == 0 else rng.normal(0.0, np.pi / 2, n * n)
        trace = [f(x0)]
        res = minimize(f, x0, method="BFGS", callback=lambda xk: trace.append(f(xk)),
                       options={"maxiter": budget, "gtol": 1e-12})
        val = float(res.fun)
        cand = (val, r, res.x, bool(res.success) or res.status == 2, tuple(trace))
        if best is None or val < best[0] - 1e-15:
            best = cand
    val, r, x, ok, trace = best
    u = _unitary(x, n)
    eye = np.eye(n)
    return SnipResult(u, val, ok, _mean_entropy(eye, rhos, shape), _mean_entropy(u, rhos, shape), r, trace)
