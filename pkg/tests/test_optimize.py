import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from coherent_control import (OptimizerConfig, OrthonormalBasis, delta_Z, haar_unitary,
                              lqicc_lower_bound, min_basis_delta, pure_state_recoverable,
                              random_state, upper_bound_report)
from coherent_control.errors import ArgumentError
from coherent_control.fixtures import (qutrit_qubit_mixture, maximally_correlated,
                                       maximally_correlated_psi, product_mixed, qc_example,
                                       singlet)
from coherent_control.optimize import golden_section, trivial_lower_bound

import oracles

FAST = OptimizerConfig(restarts=4)


def test_golden_section_finds_parabola_maximum():
    x, fx = golden_section(lambda t: 1 - (t - 0.3) ** 2, -1, 1, 1e-9)
    assert_allclose(x, 0.3, atol=1e-7)
    assert_allclose(fx, 1.0, atol=1e-12)


def test_config_validation():
    with pytest.raises(ArgumentError):
        OptimizerConfig(restarts=0)
    with pytest.raises(ArgumentError):
        OptimizerConfig(parameterization="gradient")


def test_qutrit_qubit_lower_bound():
    res = lqicc_lower_bound(qutrit_qubit_mixture())
    assert_allclose(res.value, 0.8166711, atol=1e-5)
    assert res.converged and len(res.restart_values) == 32
    assert res.value == max(res.restart_values)


def test_qutrit_qubit_povm_mode_matches_projective():
    res = lqicc_lower_bound(qutrit_qubit_mixture(), config=OptimizerConfig(
        restarts=8, parameterization="povm"))
    assert_allclose(res.value, 0.8166711, atol=1e-4)
    assert len(res.argopt) == 4          # r = 2, so r^2 elements


def test_reported_value_matches_measurement_oracle():
    rho = random_state((3, 2), seed=1)
    res = lqicc_lower_bound(rho, config=FAST)
    elements = res.argopt.elements
    assert_allclose(sum(elements), np.eye(2), atol=1e-9)
    assert_allclose(oracles.measured_coherence(rho.mat, 3, 2, elements), res.value, atol=1e-9)


def test_maximally_correlated_pure_state():
    rho = maximally_correlated()
    h = -(0.9 * math.log2(0.9) + 0.1 * math.log2(0.1))
    assert_allclose(delta_Z(rho).value, 0.468996, atol=1e-6)
    assert_allclose(h, 0.468996, atol=1e-6)
    assert abs(lqicc_lower_bound(rho, config=FAST).value - h) <= 5e-3


def test_pure_state_record():
    rec = pure_state_recoverable(maximally_correlated_psi(), (2, 2))
    assert rec.certified
    assert_allclose(rec.delta, 0.468996, atol=1e-6)
    assert_allclose(rec.delta_after, rec.delta, atol=1e-9)
    assert_allclose(rec.weights, [0.9, 0.1], atol=1e-12)
    assert_allclose(sorted(rec.schmidt_coeffs ** 2), [0.1, 0.9], atol=1e-12)
    assert rec.maximally_correlated.dims == (2, 2, 2)


def test_pure_state_rejects_bad_input():
    with pytest.raises(ArgumentError):
        pure_state_recoverable([1, 0, 0], (2, 2))
    with pytest.raises(ArgumentError):
        pure_state_recoverable([1, 1, 0, 0], (2, 2))


def test_quantum_classical_gap_closes():
    rep = upper_bound_report(qc_example(), config=FAST)
    assert abs(rep.gap) <= 1e-6


def test_qutrit_qubit_gap():
    rep = upper_bound_report(qutrit_qubit_mixture(), config=OptimizerConfig(restarts=8))
    assert_allclose(rep.gap, 0.8925857 - 0.8166711, atol=1e-5)
    assert_allclose(rep.gap, 0.0758, atol=5e-4)


def test_bound_chain_on_random_states():
    for seed in range(10):
        rho = random_state((3, 3) if seed % 2 else (2, 3), seed=seed)
        low = lqicc_lower_bound(rho, config=FAST).value
        assert trivial_lower_bound(rho) - 1e-6 <= low <= delta_Z(rho).value + 1e-6


def test_lower_bound_in_rotated_basis():
    basis = OrthonormalBasis(haar_unitary(2, 5))
    rho = random_state((2, 2), seed=5)
    low = lqicc_lower_bound(rho, basis, FAST).value
    assert trivial_lower_bound(rho, basis) - 1e-6 <= low <= delta_Z(rho, basis).value + 1e-6


def test_singlet_min_basis():
    res = min_basis_delta(singlet(), FAST)
    assert_allclose(res.value, 1.0, atol=1e-9)


def test_product_state_min_basis_is_eigenbasis():
    res = min_basis_delta(product_mixed(), FAST)
    assert res.value <= 1e-6
    eig = np.linalg.eigh(np.array([[0.75, 0.25], [0.25, 0.25]]))[1]
    overlaps = np.abs(eig.conj().T @ res.argopt.matrix)
    assert_allclose(np.sort(overlaps.max(axis=0)), [1, 1], atol=1e-3)


def test_min_basis_upper_bounds_computational():
    rho = random_state((2, 3), seed=6)
    assert min_basis_delta(rho, FAST).value <= delta_Z(rho).value + 1e-9


def test_restarts_are_deterministic():
    rho = random_state((2, 3), seed=7)
    a = lqicc_lower_bound(rho, config=OptimizerConfig(restarts=3, seed=4))
    b = lqicc_lower_bound(rho, config=OptimizerConfig(restarts=3, seed=4))
    assert a.restart_values == b.restart_values
    assert a.best_restart == b.best_restart


def test_threads_do_not_change_result():
    rho = random_state((2, 3), seed=8)
    a = lqicc_lower_bound(rho, config=OptimizerConfig(restarts=4, seed=1))
    b = lqicc_lower_bound(rho, config=OptimizerConfig(restarts=4, seed=1, threads=4))
    assert a.restart_values == b.restart_values


def test_unconverged_is_flagged():
    res = lqicc_lower_bound(random_state((3, 3), seed=9),
                            config=OptimizerConfig(restarts=1, max_iters=1))
    assert not res.converged and res.sweeps == 1


def _interior_povm(rng, d_b, n_mix=3):
    # elementwise mixture of projective measurements: E_k = sum_j w_j P^(j)_k
    w = rng.dirichlet(np.ones(n_mix))
    frames = [haar_unitary(d_b, rng) for _ in range(n_mix)]
    return [sum(w[j] * np.outer(f[:, k], f[:, k].conj()) for j, f in enumerate(frames))
            for k in range(d_b)]


def test_interior_povms_never_beat_projective():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        dims = ((2, 2), (2, 3), (3, 2))[int(rng.integers(3))]
        rho = random_state(dims, seed=rng)
        best = lqicc_lower_bound(rho, config=FAST).value
        for _ in range(10):
            value = oracles.measured_coherence(rho.mat, *dims, _interior_povm(rng, dims[1]))
            assert value <= best + 1e-9
