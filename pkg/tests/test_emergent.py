import itertools

import numpy as np
import pytest

from perceptronium import ConfigError, TachyonicModeError
from perceptronium.emergent import (
    SIGMA_Z,
    coupling_matrix,
    dft3,
    dispersion_grid,
    lattice_dispersion,
    lattice_normal_modes,
    nearest_neighbor_couplings,
    nearest_neighbor_dispersion,
    qubit_eigenstate,
    qubit_oscillator,
)


@pytest.mark.parametrize("b", range(1, 11))
def test_qubit_oscillator_spectrum_is_exact(b):
    h = qubit_oscillator(b)
    d = np.diag(h)
    assert np.count_nonzero(h - np.diag(d)) == 0
    assert np.array_equal(np.sort(d), np.arange(2**b) - (2**b - 1) / 2)


def test_single_qubit_and_three_qubit_cases():
    assert np.array_equal(qubit_oscillator(1), SIGMA_Z / 2)
    assert np.array_equal(np.sort(np.diag(qubit_oscillator(3))), np.arange(-3.5, 4))
    assert np.array_equal(qubit_oscillator(3) + 3.5 * np.eye(8), np.diag(np.arange(8)[::-1]))


def test_binary_eigenvectors():
    e6 = qubit_eigenstate(3, 6)
    want = np.kron(np.kron([1, 0], [1, 0]), [0, 1])  # |110> with up = (1, 0)
    assert np.array_equal(e6, want)
    for b in range(1, 7):
        h = qubit_oscillator(b)
        for k in range(2**b):
            v = qubit_eigenstate(b, k)
            assert np.allclose(h @ v, (k - (2**b - 1) / 2) * v, atol=0)
    with pytest.raises(ConfigError):
        qubit_eigenstate(2, 4)
    with pytest.raises(ConfigError):
        qubit_oscillator(13)


def test_dispersion_closed_forms(rng):
    c = nearest_neighbor_couplings(1.3, 0.7)
    assert lattice_dispersion(c, [0, 0, 0]) == pytest.approx(1.3**2)
    assert lattice_dispersion(c, [np.pi, 0, 0]) == pytest.approx(1.3**2 + 4 * 0.7**2)
    for _ in range(20):
        k = rng.uniform(-np.pi, np.pi, 3)
        assert lattice_dispersion(c, k) == pytest.approx(nearest_neighbor_dispersion(1.3, 0.7, k), abs=1e-12)


def test_small_wavenumber_is_isotropic(rng):
    c = nearest_neighbor_couplings(1.0, 0.5)
    for eps in (1e-2, 1e-3):
        k = eps * rng.standard_normal(3)
        err = lattice_dispersion(c, k) - (1 + 0.25 * k @ k)
        assert abs(err) < 0.25 * (k @ k) ** 2
    # lattice spacing a = c / gamma turns gamma^2 |kappa|^2 into (c k)^2
    light, gamma = 3.0, 0.5
    a = light / gamma
    kvec = np.array([1e-3, 2e-3, -1e-3]) / a
    assert lattice_dispersion(c, kvec * a) == pytest.approx(1 + (light**2) * kvec @ kvec, rel=1e-9)


def test_asymmetric_couplings_rejected():
    with pytest.raises(ConfigError):
        lattice_dispersion({(0, 0, 0): 1.0, (1, 0, 0): 0.5}, [0.1, 0, 0])


def test_decoupled_modes():
    assert np.allclose(lattice_normal_modes(2, 1.0, 0.0), 1.0)
    assert len(lattice_normal_modes(3, 1.0, 1.0)) == 27


def test_normal_modes_match_formula_side_four():
    modes = lattice_normal_modes(4, 1.0, 1.0)
    formula = np.sort(np.sqrt([row[3] for row in dispersion_grid(4, 1.0, 1.0)]))
    assert len(modes) == 64
    assert np.max(np.abs(modes - formula)) < 1e-9


def test_dft_diagonalizes_circulant():
    side = 4
    a = coupling_matrix(side, nearest_neighbor_couplings(1.0, 1.0))
    f = dft3(side)
    d = f.conj().T @ a @ f
    assert np.max(np.abs(d - np.diag(np.diag(d)))) < 1e-10
    for q in itertools.product(range(side), repeat=3):
        i = (q[0] * side + q[1]) * side + q[2]
        k = 2 * np.pi * np.array(q) / side
        assert d[i, i].real == pytest.approx(nearest_neighbor_dispersion(1.0, 1.0, k), abs=1e-10)


def test_tachyonic_mode():
    with pytest.raises(TachyonicModeError):
        lattice_normal_modes(2, 0.0, 1.0, mu_squared=-1.0)
