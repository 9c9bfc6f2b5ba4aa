"""Input validation helpers and the package exception hierarchy."""

from __future__ import annotations

import numpy as np

HERMITIAN_RTOL = 1e-12
TRACE_ATOL = 1e-12
EIG_CLAMP = 1e-10
PROB_CLAMP = 1e-12


class PerceptroniumError(Exception):
    """Base class for all package errors."""


class ShapeError(PerceptroniumError, ValueError):
    """Operand dimensions do not match the declared factorization."""


class InvalidStateError(PerceptroniumError, ValueError):
    """Matrix or vector violates a state invariant."""


class ZeroProbabilityBranchError(PerceptroniumError, ValueError):
    """Requested branch has (numerically) zero probability."""


class NotSeparableError(PerceptroniumError, ValueError):
    """A product state was required but the input is correlated."""


class ConfigError(PerceptroniumError, ValueError):
    """Invalid experiment configuration."""


class NumericalError(PerceptroniumError, ArithmeticError):
    """A numerical routine produced an unusable result."""


class TachyonicModeError(NumericalError):
    """A lattice normal mode has negative squared frequency."""


def check_matrix(a, name="matrix"):
    """Return ``a`` as a finite 2-D complex array."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ShapeError(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    a = a.astype(complex, copy=False)
    if not np.all(np.isfinite(a)):
        raise InvalidStateError(f"{name} has non-finite entries")
    return a


def check_square(a, name="matrix"):
    a = check_matrix(a, name)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {a.shape}")
    return a


def check_hermitian(h, name="operator"):
    """Return ``h`` as a complex square array after checking Hermiticity.

    The tolerance is relative: ``max|h - h^dagger| <= 1e-12 * max(1, ||h||)``.
    """
    h = check_square(h, name)
    scale = max(1.0, float(np.linalg.norm(h)))
    if np.max(np.abs(h - h.conj().T)) > HERMITIAN_RTOL * scale:
        raise InvalidStateError(f"{name} is not Hermitian")
    return h


def check_density_matrix(rho, name="rho"):
    """Validate a density matrix: Hermitian, unit trace, eigenvalues >= -1e-10."""
    rho = check_hermitian(rho, name)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > max(TRACE_ATOL, 1e-12 * rho.shape[0]):
        raise InvalidStateError(f"{name} has trace {tr!r}, expected 1")
    lam = np.linalg.eigvalsh(rho)
    if lam[0] < -EIG_CLAMP:
        raise InvalidStateError(f"{name} has negative eigenvalue {lam[0]:.3e}")
    return rho


def check_probability_vector(p, name="p"):
    """Return ``p`` as a float vector with tiny negatives clamped to zero."""
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0 or not np.all(np.isfinite(p)):
        raise InvalidStateError(f"{name} must be a non-empty finite vector")
    if p.min() < -PROB_CLAMP:
        raise InvalidStateError(f"{name} has negative entry {p.min():.3e}")
    if abs(p.sum() - 1.0) > 1e-10:
        raise InvalidStateError(f"{name} sums to {p.sum()!r}, expected 1")
    return np.clip(p, 0.0, None)


def check_unitary(u, name="unitary", atol=1e-10):
    u = check_square(u, name)
    if np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))) > atol:
        raise InvalidStateError(f"{name} is not unitary")
    return u


def check_same_dim(*mats):
    dims = {m.shape for m in mats}
    if len(dims) != 1:
        raise ShapeError(f"dimension mismatch: {sorted(dims)}")


def check_shape(shape, dim=None, min_factor=2):
    """Coerce ``shape`` to a :class:`FactorShape` and optionally match ``dim``."""
    from .hilbert import FactorShape

    try:
        l, m = (int(x) for x in shape)
    except (TypeError, ValueError) as exc:
        raise ShapeError(f"shape must be a pair of integers, got {shape!r}") from exc
    if l < min_factor or m < min_factor:
        raise ShapeError(f"factor dimensions must be >= {min_factor}, got ({l}, {m})")
    if dim is not None and l * m != dim:
        raise ShapeError(f"shape ({l}, {m}) does not factor dimension {dim}")
    return FactorShape(l, m)
