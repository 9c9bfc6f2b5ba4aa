"""Estimator-style wrappers around the functional core.

Each estimator takes its search settings in ``__init__``, does the work in
``fit`` and exposes results as trailing-underscore attributes, so they
support ``get_params``/``set_params``/``clone`` like any scikit-learn
estimator. ``transform`` rotates operators into the fitted basis.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_density_matrix, check_hermitian, check_shape, check_square
from .autonomy import DEFAULT_SNIP_TIMES, factorization_optimize
from .classical import ClassicalState, classical_phi
from .quantum import cruelest_basis
from .separability import optimal_basis

__all__ = ["CruelestCut", "QuantumPhi", "HamiltonianSeparator", "SnipFactorizer"]


class CruelestCut(BaseEstimator):
    """Classical integrated information of a sample of bit strings.

    ``fit(X)`` takes an ``(m, n)`` 0/1 array (one word per row) with optional
    ``sample_weight``; duplicates are merged.

    Attributes
    ----------
    phi_curve_ : list of (k, phi)
    cuts_ : dict mapping k to the achieving :class:`~perceptronium.classical.Cut`
    phi_ : float
        Value at ``k`` (or at ``n // 2`` when ``k`` is None).
    """

    def __init__(self, k=None, mode="auto", seed=0):
        self.k = k
        self.mode = mode
        self.seed = seed

    def fit(self, X, y=None, sample_weight=None):
        x = np.asarray(X)
        if x.ndim != 2 or not np.isin(x, (0, 1)).all():
            raise ValueError("X must be a 2-D array of 0/1 entries")
        m, n = x.shape
        w = np.ones(m) if sample_weight is None else np.asarray(sample_weight, dtype=float)
        codes = (x.astype(np.int64) << np.arange(n)).sum(axis=1)
        uniq, inv = np.unique(codes, return_inverse=True)
        probs = np.bincount(inv, weights=w)
        state = ClassicalState(n, uniq, probs / probs.sum())
        ks = range(1, n // 2 + 1) if self.k is None else [self.k]
        self.phi_curve_, self.cuts_ = [], {}
        for k in ks:
            r = classical_phi(state, k, mode=self.mode, seed=self.seed)
            self.phi_curve_.append((k, r.phi))
            self.cuts_[k] = r.cut
        self.phi_ = self.phi_curve_[-1][1]
        self.n_features_in_ = n
        return self


class QuantumPhi(TransformerMixin, BaseEstimator):
    """Cruelest factorization of a density matrix.

    Attributes
    ----------
    phi_ : float
    permutation_ : tuple
    basis_ : ndarray
        Unitary whose columns are the cruelest-cut basis vectors.
    certified_ : bool
    """

    def __init__(self, shape=(2, 2), mode="auto", seed=0):
        self.shape = shape
        self.mode = mode
        self.seed = seed

    def fit(self, X, y=None):
        rho = check_density_matrix(X)
        shape = check_shape(self.shape, rho.shape[0])
        self.basis_, res = cruelest_basis(rho, shape, mode=self.mode, seed=self.seed)
        self.phi_ = res.phi
        self.permutation_ = res.permutation
        self.certified_ = res.certified
        return self

    def transform(self, X):
        check_is_fitted(self, "basis_")
        a = check_square(X)
        return self.basis_.conj().T @ a @ self.basis_


class HamiltonianSeparator(TransformerMixin, BaseEstimator):
    """Maximally separable factorization of a Hamiltonian.

    Attributes
    ----------
    report_ : SeparabilityReport
    integration_energy_ : float
    basis_ : ndarray
    """

    def __init__(self, shape=(2, 2), mode="auto", seed=0):
        self.shape = shape
        self.mode = mode
        self.seed = seed

    def fit(self, X, y=None):
        h = check_hermitian(X)
        shape = check_shape(self.shape, h.shape[0])
        self.basis_, self.report_ = optimal_basis(h, shape, mode=self.mode, seed=self.seed)
        self.integration_energy_ = self.report_.integration_energy
        return self

    def transform(self, X):
        check_is_fitted(self, "basis_")
        a = check_square(X)
        return self.basis_.conj().T @ a @ self.basis_


class SnipFactorizer(TransformerMixin, BaseEstimator):
    """Factorization that keeps an evolving pure state closest to a product state.

    ``fit(X, y)`` takes the initial density matrix ``X`` and Hamiltonian ``y``.

    Attributes
    ----------
    unitary_ : ndarray
    objective_ : float
    converged_ : bool
    entropy_before_, entropy_after_ : float
    """

    def __init__(self, shape=(2, 2), times=DEFAULT_SNIP_TIMES, budget=400, restarts=8, seed=0):
        self.shape = shape
        self.times = times
        self.budget = budget
        self.restarts = restarts
        self.seed = seed

    def fit(self, X, y):
        res = factorization_optimize(
            X, y, times=self.times, budget=self.budget, seed=self.seed,
            restarts=self.restarts, shape=self.shape,
        )
        self.unitary_ = res.u
        self.objective_ = res.objective
        self.converged_ = res.converged
        self.entropy_before_ = res.entropy_before
        self.entropy_after_ = res.entropy_after
        return self

    def transform(self, X):
        check_is_fitted(self, "unitary_")
        a = check_square(X)
        return self.unitary_ @ a @ self.unitary_.conj().T
