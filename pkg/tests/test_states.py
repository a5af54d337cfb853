import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from coherent_control import (DensityMatrix, OrthonormalBasis, dephase, eig_hermitian, fidelity,
                              haar_unitary, partial_trace, random_state, relative_entropy, tensor,
                              von_neumann_entropy)
from coherent_control.config import override, settings as cfg
from coherent_control.errors import ArgumentError, CapacityError, ValidationError
from coherent_control.states import check_capacity, shannon_bits

import oracles

seeds = st.integers(0, 2**32 - 1)
small_dims = st.sampled_from([(2,), (3,), (2, 2), (2, 3), (3, 2)])


def test_binary_entropy():
    rho = DensityMatrix((2,), np.diag([0.75, 0.25]))
    assert_allclose(von_neumann_entropy(rho), 0.811278, atol=1e-6)


def test_eigenvalues_of_mixed_qubit():
    m = np.array([[0.75, 0.25], [0.25, 0.25]])
    spec = eig_hermitian(m)
    assert_allclose(spec.values, [(1 + math.sqrt(0.5)) / 2, (1 - math.sqrt(0.5)) / 2], atol=1e-12)
    assert spec.values[0] >= spec.values[1]
    assert_allclose(spec.vectors @ np.diag(spec.values) @ spec.vectors.conj().T, m, atol=1e-12)


@pytest.mark.parametrize("bad, invariant", [
    (np.array([[0.5, 0.1], [0.2, 0.5]]), "hermitian"),
    (np.diag([0.6, 0.6]), "trace"),
    (np.diag([1.2, -0.2]), "positive-semidefinite"),
])
def test_invalid_states_rejected(bad, invariant):
    with pytest.raises(ValidationError) as exc:
        DensityMatrix((2,), bad)
    assert invariant in exc.value.invariant


def test_dims_must_match_matrix():
    with pytest.raises(ArgumentError):
        DensityMatrix((2, 2), np.eye(3) / 3)


def test_density_matrix_is_immutable():
    rho = DensityMatrix.maximally_mixed((2,))
    with pytest.raises(AttributeError):
        rho.dims = (4,)
    with pytest.raises(ValueError):
        rho.mat[0, 0] = 1.0


def test_partial_trace_of_product():
    a = random_state((2,), seed=1)
    b = random_state((3,), seed=2)
    ab = tensor(a, b)
    assert ab.dims == (2, 3)
    assert_allclose(partial_trace(ab, [0]).mat, a.mat, atol=1e-12)
    assert_allclose(partial_trace(ab, [1]).mat, b.mat, atol=1e-12)


def test_partial_trace_keep_order_is_sorted():
    rho = random_state((2, 3, 2), seed=3)
    assert partial_trace(rho, [2, 0]).dims == (2, 2)
    assert_allclose(partial_trace(rho, [2, 0]).mat, partial_trace(rho, [0, 2]).mat)


def test_partial_trace_needs_something_to_keep():
    with pytest.raises(ArgumentError):
        partial_trace(random_state((2, 2), seed=0), [])


@settings(max_examples=30, deadline=None)
@given(seed=seeds, dims=st.sampled_from([(2, 2), (2, 3), (3, 3)]))
def test_partial_trace_matches_reshape_oracle(seed, dims):
    rho = random_state(dims, seed=seed)
    assert_allclose(partial_trace(rho, [0]).mat, oracles.ptrace_b(rho.mat, *dims), atol=1e-12)
    assert_allclose(partial_trace(rho, [1]).mat, oracles.ptrace_a(rho.mat, *dims), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, dims=small_dims)
def test_entropy_bounds(seed, dims):
    rho = random_state(dims, seed=seed)
    s = von_neumann_entropy(rho)
    assert -1e-12 <= s <= math.log2(rho.dim) + 1e-12
    assert_allclose(s, oracles.entropy(rho.mat), atol=1e-10)


def test_pure_state_has_zero_entropy():
    assert von_neumann_entropy(random_state((2, 3), rank=1, seed=4)) == pytest.approx(0, abs=1e-10)


def test_relative_entropy_basics():
    rho = random_state((3,), seed=5)
    assert relative_entropy(rho, rho) == pytest.approx(0, abs=1e-10)
    mixed = DensityMatrix.maximally_mixed((3,))
    assert_allclose(relative_entropy(rho, mixed), math.log2(3) - von_neumann_entropy(rho),
                    atol=1e-10)


def test_relative_entropy_infinite_outside_support():
    rho = DensityMatrix((2,), np.diag([0.5, 0.5]))
    sigma = DensityMatrix.basis_state(0, (2,))
    assert relative_entropy(rho, sigma) == math.inf


@settings(max_examples=25, deadline=None)
@given(seed=seeds)
def test_klein_inequality(seed):
    rng = np.random.default_rng(seed)
    rho, sigma = random_state((2, 2), seed=rng), random_state((2, 2), seed=rng)
    assert relative_entropy(rho, sigma) >= -1e-12


def test_fidelity():
    rho = random_state((2, 2), seed=6)
    assert fidelity(rho, rho) == pytest.approx(1, abs=1e-9)
    a, b = DensityMatrix.basis_state(0, (2,)), DensityMatrix.basis_state(1, (2,))
    assert fidelity(a, b) == pytest.approx(0, abs=1e-12)


def test_dephase_computational():
    rho = random_state((2, 2), seed=7)
    out = dephase(rho)
    assert_allclose(out.mat, oracles.dephase_a(rho.mat, 2, 2), atol=1e-12)
    assert_allclose(dephase(out).mat, out.mat, atol=1e-12)


def test_dephase_in_rotated_basis():
    basis = OrthonormalBasis(haar_unitary(3, 8))
    rho = random_state((3, 2), seed=8)
    assert_allclose(dephase(rho, basis).mat, oracles.dephase_a(rho.mat, 3, 2, basis.matrix),
                    atol=1e-12)


def test_dephase_other_subsystem():
    rho = random_state((2, 3), seed=9)
    swapped = rho.mat.reshape(2, 3, 2, 3).transpose(1, 0, 3, 2).reshape(6, 6)
    expect = oracles.dephase_a(swapped, 3, 2).reshape(3, 2, 3, 2).transpose(1, 0, 3, 2)
    assert_allclose(dephase(rho, subsystem=1).mat, expect.reshape(6, 6), atol=1e-12)


def test_basis_validation():
    with pytest.raises(ValidationError):
        OrthonormalBasis(np.array([[1, 1], [0, 1]]))
    b = OrthonormalBasis.from_vectors([[0, 1], [1, 0]])
    assert not b.is_computational()
    assert OrthonormalBasis.computational(3).is_computational()


def test_random_state_rank():
    rho = random_state((3, 3), rank=2, seed=10)
    assert np.linalg.matrix_rank(rho.mat, tol=1e-10) == 2
    assert_allclose(np.trace(rho.mat), 1, atol=1e-12)


def test_random_state_is_deterministic():
    assert_allclose(random_state((2, 3), seed=11).mat, random_state((2, 3), seed=11).mat)


def test_haar_unitary():
    u = haar_unitary(4, 0)
    assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-12)
    weights = [abs(haar_unitary(2, s)[0, 0]) ** 2 for s in range(2000)]
    assert abs(np.mean(weights) - 0.5) <= 0.02


def test_shannon_ignores_zeros():
    assert shannon_bits([0.5, 0.5, 0.0]) == pytest.approx(1.0)


def test_capacity():
    with pytest.raises(CapacityError):
        check_capacity(10_000)
    with override(max_dim=8):
        with pytest.raises(CapacityError):
            random_state((3, 3), seed=0)
    assert cfg.max_dim == 4096


def test_tolerance_profiles():
    with override(profile="loose"):
        DensityMatrix((2,), np.diag([0.5 + 1e-9, 0.5]))
    with override(profile="strict"):
        with pytest.raises(ValidationError):
            DensityMatrix((2,), np.diag([0.5 + 1e-10, 0.5]))
