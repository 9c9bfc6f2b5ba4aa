"""Dense linear algebra on the Hilbert-Schmidt space of operators.

Index convention
----------------
A bipartite space of dimension ``n = l*m`` uses the composite index
``alpha = m*i + i'`` where ``i`` indexes the first factor (dimension ``l``)
and ``i'`` the second (dimension ``m``). This is exactly the ordering
produced by :func:`numpy.kron`, so ``kron(A, B)`` acts as ``A`` on the
first factor. When ``n`` eigenvalues are laid out on an ``l x m`` grid,
rows belong to the first factor.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ._validation import (
    ShapeError,
    ZeroProbabilityBranchError,
    check_density_matrix,
    check_hermitian,
    check_matrix,
    check_same_dim,
    check_shape,
    check_square,
)

__all__ = [
    "FactorShape",
    "kron",
    "ptrace",
    "hs_inner",
    "hs_norm",
    "hs_dot_cross",
    "hs_projectors",
    "diag_projectors",
    "evolve",
    "evolve_many",
    "branch_project",
    "star",
    "pr",
    "t1",
    "t2",
    "haar_unitary",
    "haar_unitaries",
    "random_hermitian",
    "random_density",
    "random_pure",
    "commutator",
    "matrix_to_json",
    "matrix_from_json",
]


class FactorShape(NamedTuple):
    """Ordered pair ``(l, m)`` declaring an ``l*m`` dimensional bipartition."""

    l: int
    m: int

    @property
    def n(self) -> int:
        return self.l * self.m

    def swapped(self) -> "FactorShape":
        return FactorShape(self.m, self.l)


def kron(a, b):
    """Tensor product with entry ``(ii', jj') = a[i, j] * b[i', j']``."""
    return np.kron(check_matrix(a, "a"), check_matrix(b, "b"))


def commutator(a, b):
    return a @ b - b @ a


def _blocks(a, shape):
    a = check_square(a)
    shape = check_shape(shape, a.shape[0], min_factor=1)
    return a.reshape(shape.l, shape.m, shape.l, shape.m), shape


def ptrace(a, shape, which):
    """Partial trace over one factor.

    ``which="first"`` traces out the first factor and returns an ``m x m``
    matrix; ``which="second"`` returns an ``l x l`` matrix.
    """
    t, _ = _blocks(a, shape)
    if which in ("first", 1):
        return np.einsum("kikj->ij", t)
    if which in ("second", 2):
        return np.einsum("ikjk->ij", t)
    raise ValueError(f"which must be 'first' or 'second', got {which!r}")


def hs_inner(a, b):
    """Hilbert-Schmidt inner product ``tr(a^dagger b)``."""
    a = check_matrix(a, "a")
    b = check_matrix(b, "b")
    check_same_dim(a, b)
    return complex(np.vdot(a, b))


def hs_norm(a):
    return float(np.linalg.norm(check_matrix(a)))


def hs_dot_cross(a, b):
    """Return ``(a . b, a x b)`` with the dot real and the cross ``i[a, b]``."""
    a = check_hermitian(a, "a")
    b = check_hermitian(b, "b")
    check_same_dim(a, b)
    return float(np.vdot(a, b).real), 1j * commutator(a, b)


def hs_projectors(h, shape):
    """Split ``h`` into trace, first-only, second-only and interaction parts.

    Returns ``(H0, H1, H2, H3)`` as full ``n x n`` operators that are
    mutually orthogonal under the Hilbert-Schmidt inner product and sum to
    ``h``.
    """
    h = check_square(h, "h")
    shape = check_shape(shape, h.shape[0])
    l, m = shape
    n = l * m
    h0 = (np.trace(h) / n) * np.eye(n)
    h1 = np.kron(ptrace(h, shape, "second") / m, np.eye(m)) - h0
    h2 = np.kron(np.eye(l), ptrace(h, shape, "first") / l) - h0
    h3 = h - h0 - h1 - h2
    return h0, h1, h2, h3


def _q(k):
    return np.full((k, k), 1.0 / k)


def diag_projectors(eigs, shape):
    """Grid form of :func:`hs_projectors` for a diagonal operator.

    ``eigs`` is laid out row-major on an ``l x m`` grid (rows = first factor).
    Returns four ``l x m`` real grids ``Q G Q, P G Q, Q G P, P G P`` with
    ``Q_k`` the all-``1/k`` matrix and ``P_k = I - Q_k``.
    """
    eigs = np.asarray(eigs, dtype=float).ravel()
    shape = check_shape(shape, eigs.size)
    l, m = shape
    g = eigs.reshape(l, m)
    ql, qm = _q(l), _q(m)
    pl, pm = np.eye(l) - ql, np.eye(m) - qm
    return ql @ g @ qm, pl @ g @ qm, ql @ g @ pm, pl @ g @ pm


def _eigh(h):
    e, v = np.linalg.eigh(check_hermitian(h, "h"))
    return e, v


def evolve(rho, h, t):
    """Unitary evolution ``e^{iHt} rho e^{-iHt}`` via eigendecomposition."""
    rho = check_square(rho, "rho")
    e, v = _eigh(h)
    check_same_dim(rho, v)
    return _evolve_eig(rho, e, v, t)


def _evolve_eig(rho, e, v, t):
    r = v.conj().T @ rho @ v
    ph = np.exp(1j * e * t)
    r = ph[:, None] * r * ph.conj()[None, :]
    out = v @ r @ v.conj().T
    return (out + out.conj().T) / 2


def evolve_many(rho, h, times):
    """Evolve ``rho`` to each time in ``times`` reusing one eigendecomposition."""
    rho = check_square(rho, "rho")
    e, v = _eigh(h)
    check_same_dim(rho, v)
    r0 = v.conj().T @ rho @ v
    out = []
    for t in np.asarray(times, dtype=float):
        ph = np.exp(1j * e * t)
        r = v @ (ph[:, None] * r0 * ph.conj()[None, :]) @ v.conj().T
        out.append((r + r.conj().T) / 2)
    return np.array(out)


def star(a, shape):
    """Swap the two factors: ``(A*)[i'i, j'j] = A[ii', jj']``.

    The result lives on the swapped shape ``(m, l)``, so
    ``star(star(a, shape), shape.swapped())`` returns ``a``.
    """
    t, shape = _blocks(a, shape)
    n = shape.n
    return t.transpose(1, 0, 3, 2).reshape(n, n)


def pr(a, shape, k):
    """The ``k``-th diagonal block ``a[k i', k j']`` as an ``m x m`` matrix."""
    t, shape = _blocks(a, shape)
    if not 0 <= k < shape.l:
        raise IndexError(f"branch index {k} outside [0, {shape.l})")
    return t[k, :, k, :].copy()


def branch_project(rho, shape, k, tol=1e-12):
    """Probability ``p_k = (tr_2 rho)_kk`` and normalized branch ``pr_k(rho)/p_k``."""
    rho = check_density_matrix(rho)
    shape = check_shape(shape, rho.shape[0])
    block = pr(rho, shape, k)
    p = float(np.trace(block).real)
    if p <= tol:
        raise ZeroProbabilityBranchError(f"branch {k} has probability {p:.3e}")
    return p, block / p


def t1(a, shape):
    """``I (x) tr_1(a) / l``."""
    shape = check_shape(shape, np.shape(a)[0], min_factor=1)
    return np.kron(np.eye(shape.l), ptrace(a, shape, "first")) / shape.l


def t2(a, shape):
    """``tr_2(a) (x) I / m``."""
    shape = check_shape(shape, np.shape(a)[0], min_factor=1)
    return np.kron(ptrace(a, shape, "second"), np.eye(shape.m)) / shape.m


def haar_unitary(n, rng):
    """Haar-distributed unitary from the QR decomposition of a Ginibre matrix.

    The phases of ``R``'s diagonal are absorbed into ``Q``; without this
    correction the distribution is not Haar.
    """
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))[None, :]


def haar_unitaries(n, count, rng):
    """Batch of ``count`` Haar unitaries, shape ``(count, n, n)``."""
    z = (rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=1, axis2=2)
    return q * (d / np.abs(d))[:, None, :]


def random_hermitian(n, rng, scale=1.0):
    """GUE-style random Hermitian matrix."""
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (a + a.conj().T) / 2


def random_density(n, rng, rank=None):
    """Random density matrix ``G G^dagger / tr`` with ``G`` of shape ``(n, rank)``."""
    rank = n if rank is None else rank
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure(n, rng):
    psi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return psi / np.linalg.norm(psi)


def matrix_to_json(a):
    """Serialize to ``{"dim": n, "entries": [[re, im], ...]}`` (row-major)."""
    a = check_square(a)
    flat = a.ravel()
    return {"dim": int(a.shape[0]), "entries": [[float(z.real), float(z.imag)] for z in flat]}


def matrix_from_json(obj):
    try:
        dim = int(obj["dim"])
        entries = np.asarray(obj["entries"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ShapeError(f"malformed matrix object: {exc}") from exc
    if entries.shape != (dim * dim, 2):
        raise ShapeError(f"expected {dim * dim} [re, im] pairs, got array of shape {entries.shape}")
    return (entries[:, 0] + 1j * entries[:, 1]).reshape(dim, dim)
