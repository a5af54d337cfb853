import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from coherent_control import (DensityMatrix, OrthonormalBasis, additivity_check,
                              coherence_rel_ent, convexity_check, delta_Z, delta_is_min_oracle,
                              haar_unitary, monotonicity_check, partial_trace, random_goia_program,
                              random_state, relative_entropy)
from coherent_control.errors import ArgumentError, CapacityError
from coherent_control.fixtures import (qutrit_qubit_mixture, bell_phi_plus, basis_dependent_example,
                                       plus_zero, singlet)
from coherent_control.measures import random_cq_state

import oracles

seeds = st.integers(0, 2**32 - 1)
dims_st = st.sampled_from([(2, 2), (2, 3), (3, 2)])


def _basis(rng, d):
    return OrthonormalBasis(haar_unitary(d, rng)) if rng.random() < 0.5 else None


def test_qutrit_qubit_values():
    rho = qutrit_qubit_mixture()
    assert_allclose(delta_Z(rho).value, 0.8925857, atol=1e-6)
    assert_allclose(coherence_rel_ent(partial_trace(rho, [0])), 0.6887219, atol=1e-6)


def test_named_values():
    assert_allclose(delta_Z(bell_phi_plus()).value, 1.0, atol=1e-12)
    assert_allclose(delta_Z(singlet()).value, 1.0, atol=1e-12)
    assert_allclose(delta_Z(plus_zero()).value, 1.0, atol=1e-12)
    assert_allclose(delta_Z(basis_dependent_example()).value, 0.9597, atol=1e-4)


def test_coherence_of_plus_state():
    plus = DensityMatrix((2,), np.full((2, 2), 0.5))
    assert_allclose(coherence_rel_ent(plus), 1.0, atol=1e-12)
    assert coherence_rel_ent(plus, OrthonormalBasis(np.array([[1, 1], [1, -1]]) / np.sqrt(2))) \
        == pytest.approx(0, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, dims=dims_st)
def test_delta_closed_form_matches_oracle(seed, dims):
    rng = np.random.default_rng(seed)
    basis = _basis(rng, dims[0])
    rho = random_state(dims, int(rng.integers(1, dims[0] * dims[1] + 1)), rng)
    res = delta_Z(rho, basis)
    mat = None if basis is None else basis.matrix
    assert_allclose(res.value, oracles.delta(rho.mat, *dims, mat), atol=1e-10)
    # it is the relative entropy to its own witness
    assert_allclose(res.value, relative_entropy(rho, res.witness), atol=1e-9)
    assert -1e-12 <= res.value <= math.log2(dims[0]) + 1e-9


@settings(max_examples=30, deadline=None)
@given(seed=seeds, dims=dims_st)
def test_delta_dominates_local_coherence(seed, dims):
    rho = random_state(dims, seed=seed)
    assert delta_Z(rho).value >= coherence_rel_ent(partial_trace(rho, [0])) - 1e-10


def test_delta_vanishes_on_cq_states():
    rho = random_cq_state((3, 2), seed=1)
    assert delta_Z(rho).value == pytest.approx(0, abs=1e-10)


def test_basis_dimension_mismatch():
    with pytest.raises(ArgumentError):
        delta_Z(random_state((2, 2), seed=0), OrthonormalBasis.computational(3))


def test_oracle_finds_no_better_free_state():
    rho = random_state((2, 2), seed=2)
    res = delta_is_min_oracle(rho, n_samples=300, seed=2)
    assert res.ok and res.margin >= -1e-9


def test_oracle_detects_wrong_witness(monkeypatch):
    # feed the oracle a deliberately bad "closest" state: it must find a better one
    import coherent_control.measures as measures

    rho = random_state((2, 2), seed=3)
    monkeypatch.setattr(measures, "dephase",
                        lambda r, b: DensityMatrix.maximally_mixed(r.dims))
    assert not delta_is_min_oracle(rho, n_samples=300, seed=3)


def test_oracle_capacity():
    with pytest.raises(CapacityError):
        delta_is_min_oracle(random_state((4, 4), seed=0), n_samples=1)


@settings(max_examples=20, deadline=None)
@given(seed=seeds, dims=dims_st)
def test_additivity(seed, dims):
    rng = np.random.default_rng(seed)
    rho = random_state(dims, seed=rng)
    assert additivity_check(rho, _basis(rng, dims[0])) < 1e-9


def test_additivity_three_copies():
    assert additivity_check(random_state((2, 2), seed=4), n_copies=3) < 1e-9


@settings(max_examples=20, deadline=None)
@given(seed=seeds, k=st.integers(2, 4))
def test_convexity(seed, k):
    rng = np.random.default_rng(seed)
    states = [random_state((2, 3), seed=rng) for _ in range(k)]
    assert convexity_check(states, rng.dirichlet(np.ones(k)), _basis(rng, 2)) >= -1e-9


def test_convexity_argument_checks():
    s = random_state((2, 2), seed=0)
    with pytest.raises(ArgumentError):
        convexity_check([s, s], [0.7, 0.7])
    with pytest.raises(ArgumentError):
        convexity_check([s, random_state((2, 3), seed=0)], [0.5, 0.5])


@settings(max_examples=30, deadline=None)
@given(seed=seeds, depth=st.integers(1, 6), dims=dims_st)
def test_monotonicity_on_average(seed, depth, dims):
    rng = np.random.default_rng(seed)
    basis = _basis(rng, dims[0])
    program = random_goia_program(dims, depth, rng, basis)
    res = monotonicity_check(random_state(dims, seed=rng), basis, program)
    assert res.decrease >= -1e-9


def test_monotonicity_requires_matching_basis():
    prog = random_goia_program((2, 2), 2, seed=0)
    with pytest.raises(ArgumentError):
        monotonicity_check(random_state((2, 2), seed=0),
                           OrthonormalBasis(haar_unitary(2, 0)), prog)
