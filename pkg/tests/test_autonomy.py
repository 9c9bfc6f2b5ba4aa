import numpy as np
import pytest

from perceptronium import ConfigError, InvalidStateError
from perceptronium.autonomy import (
    DEFAULT_SNIP_TIMES,
    factorization_optimize,
    random_snip_instance,
    sliding_hamiltonian,
    sliding_potential,
    sliding_simulation,
    snip_objective,
)
from perceptronium.dynamics import apodized_state
from perceptronium.hilbert import evolve, evolve_many, ptrace, random_hermitian, random_pure
from perceptronium.info import linear_entropy


def test_potentials():
    v = sliding_potential(16, "gaussian")
    assert v.max() == pytest.approx(1) and v.min() > 0
    s = sliding_potential(16, "sinusoidal")
    assert abs(s.sum()) < 1e-12
    with pytest.raises(ConfigError):
        sliding_potential(8, "square")


@pytest.mark.parametrize("potential", ["sinusoidal", "gaussian"])
@pytest.mark.parametrize("alpha", [0, 1])
def test_branch_shortcut_matches_full_evolution(potential, alpha):
    b = 3
    rep = sliding_simulation(b, potential, alpha, omega2=0.7, coupling=0.4, samples=9, ddot0=False)
    h, sysm, _ = sliding_hamiltonian(b, potential, 0.7, 0.4)
    psi = np.kron(apodized_state(alpha, sysm.n, exact=True), [1, 0])
    rho = np.outer(psi, psi.conj())
    for t, s in zip(rep.times, rep.slin_curve):
        red = ptrace(evolve(rho, h, t), (sysm.n, 2), "second")
        assert abs(linear_entropy(red) - s) < 1e-10


def test_report_invariants():
    rep = sliding_simulation(4, "sinusoidal", 0, samples=5)
    n = 16
    assert rep.delta_h == pytest.approx(np.sqrt((n * n - 1) / 12), rel=1e-10)
    assert rep.tau_dyn == pytest.approx(1 / rep.delta_h)
    assert rep.autonomy == pytest.approx(rep.tau_ind / rep.tau_dyn)
    assert min(rep.delta_h, rep.tau_dyn, rep.tau_ind, rep.autonomy) > 0
    assert rep.slin_curve[0] == pytest.approx(0, abs=1e-15)
    assert rep.times[-1] == pytest.approx(2 * np.pi)
    # a position eigenstate has no instantaneous entropy curvature
    assert abs(rep.slin_ddot0) < 1e-12


def test_apodization_suppresses_decoherence():
    for b in (5, 6):
        s0 = sliding_simulation(b, "sinusoidal", 0, samples=5, ddot0=False).slin_T
        s1 = sliding_simulation(b, "sinusoidal", 1, samples=5, ddot0=False).slin_T
        assert s1 < s0


def test_sliding_errors():
    with pytest.raises(ConfigError):
        sliding_simulation(1)
    with pytest.raises(ConfigError):
        sliding_simulation(4, samples=1)


def test_snip_objective_vanishes_for_product_dynamics(rng):
    a, b = random_hermitian(2, rng), random_hermitian(2, rng)
    h = np.kron(a, np.eye(2)) + np.kron(np.eye(2), b)
    psi = np.kron(random_pure(2, rng), random_pure(2, rng))
    rho0 = np.outer(psi, psi.conj())
    rhos = evolve_many(rho0, h, DEFAULT_SNIP_TIMES)
    assert snip_objective(np.eye(4), rhos, (2, 2)) < 1e-12
    res = factorization_optimize(rho0, h, restarts=2, budget=50)
    assert res.objective < 1e-12
    assert res.entropy_after < 1e-6


def test_snip_trace_is_monotone_and_unitary():
    h, rho0 = random_snip_instance(1)
    res = factorization_optimize(rho0, h, restarts=2, budget=100, seed=1)
    assert np.allclose(res.u @ res.u.conj().T, np.eye(4), atol=1e-10)
    assert all(b <= a + 1e-15 for a, b in zip(res.trace, res.trace[1:]))
    assert res.entropy_after < res.entropy_before


def test_snip_budget_exhaustion_is_flagged():
    h, rho0 = random_snip_instance(4)
    res = factorization_optimize(rho0, h, restarts=1, budget=1)
    assert not res.converged
    assert res.objective <= snip_objective(np.eye(4), evolve_many(rho0, h, DEFAULT_SNIP_TIMES), (2, 2))


def test_snip_validation(rng):
    h = random_hermitian(4, rng)
    with pytest.raises(InvalidStateError):
        factorization_optimize(np.eye(4) / 4, h)
    psi = random_pure(4, rng)
    with pytest.raises(ConfigError):
        factorization_optimize(np.outer(psi, psi.conj()), h, budget=0)


def test_random_instance_is_deterministic():
    a = random_snip_instance(3)
    b = random_snip_instance(3)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
