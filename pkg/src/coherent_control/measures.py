"""The relative-entropy monotone Delta_Z and its property checks.

Delta_Z is always evaluated in closed form, S(dephased rho) - S(rho); the
explicit minimization over classical-quantum states only exists as the
small-dimension oracle :func:`delta_is_min_oracle`.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from .channels import GoiaProgram
from .errors import ArgumentError
from .states import (DensityMatrix, OrthonormalBasis, as_rng, check_capacity, dephase,
                     random_state, relative_entropy, tensor, von_neumann_entropy)

__all__ = [
    "MeasureResult", "coherence_rel_ent", "delta_Z", "delta_is_min_oracle",
    "additivity_check", "convexity_check", "monotonicity_check", "MonotonicityResult",
    "random_cq_state", "OracleResult",
]


class MeasureResult(NamedTuple):
    value: float                 # bits
    basis: OrthonormalBasis
    witness: DensityMatrix       # closest free state, the dephased input


def _basis_for(rho: DensityMatrix, basis, subsystem=0) -> OrthonormalBasis:
    d = rho.dims[subsystem]
    if basis is None:
        return OrthonormalBasis.computational(d)
    if basis.dim != d:
        raise ArgumentError(f"basis of dimension {basis.dim} does not match subsystem "
                            f"dimension {d}")
    return basis


def coherence_rel_ent(rho_a: DensityMatrix, basis: OrthonormalBasis | None = None) -> float:
    """Relative entropy of coherence S(diag_Z rho) - S(rho) of a single system."""
    d = rho_a.dim
    basis = OrthonormalBasis.computational(d) if basis is None else basis
    if basis.dim != d:
        raise ArgumentError(f"basis of dimension {basis.dim} does not match state "
                            f"dimension {d}")
    whole = DensityMatrix((d,), rho_a.mat, validate=False)
    value = von_neumann_entropy(dephase(whole, basis)) - von_neumann_entropy(whole)
    return min(max(value, 0.0), math.log2(d))


def delta_Z(rho: DensityMatrix, basis: OrthonormalBasis | None = None) -> MeasureResult:
    """Relative entropy distance to the classical-quantum states of ``basis`` on A."""
    basis = _basis_for(rho, basis)
    sigma = dephase(rho, basis)
    value = von_neumann_entropy(sigma) - von_neumann_entropy(rho)
    return MeasureResult(max(value, 0.0), basis, sigma)


def random_cq_state(dims: Sequence[int], basis: OrthonormalBasis | None = None,
                    seed=None, full_rank: bool = True) -> DensityMatrix:
    """sum_c p_c |c><c| (x) rho_c with Dirichlet weights and random rho_c."""
    rng = as_rng(seed)
    dims = tuple(dims)
    d_a, rest = dims[0], dims[1:]
    basis = OrthonormalBasis.computational(d_a) if basis is None else basis
    p = rng.dirichlet(np.ones(d_a))
    d_b = math.prod(rest) if rest else 1
    m = np.zeros((d_a * d_b, d_a * d_b), dtype=complex)
    for c in range(d_a):
        rank = None if full_rank else int(rng.integers(1, d_b + 1))
        rc = random_state((d_b,), rank, rng).mat
        v = basis.matrix[:, c]
        m += p[c] * np.kron(np.outer(v, v.conj()), rc)
    return DensityMatrix(dims, (m + m.conj().T) / 2, validate=False)


class OracleResult(NamedTuple):
    ok: bool
    margin: float                 # min over samples of S(rho||sigma) - S(rho||sigma*)
    witness: DensityMatrix | None = None

    def __bool__(self):
        return self.ok


def delta_is_min_oracle(rho: DensityMatrix, basis: OrthonormalBasis | None = None,
                        n_samples: int = 1000, seed=None, tol: float = 1e-9) -> OracleResult:
    """Check that no sampled free state is closer to ``rho`` than its dephasing."""
    check_capacity(rho.dim, max_dim=12)
    basis = _basis_for(rho, basis)
    rng = as_rng(seed)
    best = relative_entropy(rho, dephase(rho, basis))
    margin = math.inf
    for _ in range(n_samples):
        sigma = random_cq_state(rho.dims, basis, rng, full_rank=bool(rng.random() < 0.8))
        gap = relative_entropy(rho, sigma) - best
        if gap < margin:
            margin = gap
        if gap < -tol:
            return OracleResult(False, gap, sigma)
    return OracleResult(True, margin)


def _dephase_many(rho: DensityMatrix, basis: OrthonormalBasis, subsystems) -> DensityMatrix:
    for k in subsystems:
        rho = dephase(rho, basis, k)
    return rho


def additivity_check(rho: DensityMatrix, basis: OrthonormalBasis | None = None,
                     n_copies: int = 2) -> float:
    """|Delta(rho^{(x)n}) - n Delta(rho)|, dephasing every A copy in the product basis."""
    if n_copies < 2:
        raise ArgumentError("n_copies must be at least 2")
    basis = _basis_for(rho, basis)
    check_capacity(rho.dim ** n_copies)
    many = tensor(*([rho] * n_copies))
    k = len(rho.dims)
    a_copies = [i * k for i in range(n_copies)]
    lhs = von_neumann_entropy(_dephase_many(many, basis, a_copies)) - von_neumann_entropy(many)
    return abs(lhs - n_copies * delta_Z(rho, basis).value)


def convexity_check(states: Sequence[DensityMatrix], weights: Sequence[float],
                    basis: OrthonormalBasis | None = None) -> float:
    """sum_i p_i Delta(rho_i) - Delta(sum_i p_i rho_i); nonnegative for a convex measure."""
    w = np.asarray(weights, dtype=float)
    if len(w) != len(states) or not len(w):
        raise ArgumentError("need one weight per state")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
        raise ArgumentError("weights must be nonnegative and sum to 1")
    dims = states[0].dims
    if any(s.dims != dims for s in states):
        raise ArgumentError("all states must share dims")
    basis = _basis_for(states[0], basis)
    mix = DensityMatrix(dims, sum(p * s.mat for p, s in zip(w, states)), validate=False)
    avg = sum(p * delta_Z(s, basis).value for p, s in zip(w, states))
    return float(avg - delta_Z(mix, basis).value)


class MonotonicityResult(NamedTuple):
    decrease: float          # Delta(rho) - sum_b p_b Delta(rho_b)
    branches: int
    skipped: int             # degenerate branches left out of the average


def monotonicity_check(rho: DensityMatrix, basis: OrthonormalBasis | None,
                       program: GoiaProgram) -> MonotonicityResult:
    """Decrease of Delta_Z on average over the branches produced by ``program``."""
    basis = _basis_for(rho, basis)
    if basis.dim != program.basis.dim or not np.allclose(basis.matrix, program.basis.matrix):
        raise ArgumentError("program and measure must use the same incoherent basis")
    program.validate()
    outcome = program.run(rho)
    after = sum(b.probability * delta_Z(b.state, basis).value for b in outcome.branches)
    return MonotonicityResult(delta_Z(rho, basis).value - after,
                              len(outcome.branches), outcome.skipped)
