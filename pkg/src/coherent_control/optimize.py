"""Variational bounds on recoverable coherence.

Both searches run over unitary matrices whose columns are either the
measurement vectors on B (lower bound, maximized) or the candidate
incoherent basis on A (basis-minimized Delta). In both cases the objective is
a sum of independent per-column terms, so a Givens rotation acting on
columns ``(i, j)`` only needs those two terms re-evaluated.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .channels import Povm, apply, controlled_translation
from .errors import ArgumentError
from .measures import coherence_rel_ent, delta_Z
from .states import (DensityMatrix, OrthonormalBasis, check_capacity, entropy_bits,
                     haar_unitary, partial_trace, shannon_bits, tensor,
                     von_neumann_entropy)

__all__ = [
    "OptimizerConfig", "BoundResult", "givens_search", "golden_section",
    "lqicc_lower_bound", "min_basis_delta", "pure_state_recoverable", "PureStateRecord",
    "upper_bound_report", "UpperBoundReport",
]

_INV_PHI = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iters: int = 500          # full sweeps per restart
    step_tol: float = 1e-7        # angle resolution of the line search (rad)
    value_tol: float = 1e-8       # bits gained per sweep below which we stop
    seed: int = 0
    parameterization: str = "projective"   # or "povm" (Naimark dilation)
    povm_elements: int | None = None       # default r**2, r = rank of Tr_B rho
    grid: int = 8                 # coarse bracketing points per line search
    threads: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise ArgumentError("restarts must be at least 1")
        if self.max_iters < 1:
            raise ArgumentError("max_iters must be at least 1")
        if self.parameterization not in ("projective", "povm"):
            raise ArgumentError(f"unknown parameterization {self.parameterization!r}")


@dataclass
class BoundResult:
    value: float
    argopt: object                 # Povm (lower bound) or OrthonormalBasis (min basis)
    restart_values: list = field(default_factory=list)
    converged: bool = True
    best_restart: int = 0
    sweeps: int = 0
    kind: str = ""
    vectors: np.ndarray | None = None   # measurement or basis vectors as columns


def golden_section(f: Callable[[float], float], lo: float, hi: float,
                   xtol: float) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def _rotate(ui, uj, theta, imaginary):
    c, s = math.cos(theta), math.sin(theta)
    if imaginary:
        return c * ui + 1j * s * uj, 1j * s * ui + c * uj
    return c * ui + s * uj, -s * ui + c * uj


def givens_search(term: Callable[[np.ndarray], float], u0: np.ndarray, cfg: OptimizerConfig,
                  maximize: bool = True) -> tuple[np.ndarray, float, int, bool]:
    """Maximize (or minimize) ``sum_k term(U[:, k])`` over unitaries ``U``.

    Alternating sweeps over column pairs; for each pair a real and an
    imaginary Givens rotation are line-searched in turn (coarse grid on the
    period, then golden section around the best grid point). A rotation is
    only accepted if it improves the objective, so the value is monotone.

    Returns ``(U, value, sweeps, converged)`` with ``value`` in the
    caller's sign convention.
    """
    sign = 1.0 if maximize else -1.0
    u = np.array(u0, dtype=complex)
    n = u.shape[1]
    vals = [sign * term(u[:, k]) for k in range(n)]
    total = sum(vals)
    grid = np.linspace(-math.pi / 2, math.pi / 2, cfg.grid, endpoint=False)
    half = math.pi / cfg.grid
    converged = False
    sweeps = 0
    for sweeps in range(1, cfg.max_iters + 1):
        start = total
        for i in range(n):
            for j in range(i + 1, n):
                for imaginary in (False, True):
                    ui, uj = u[:, i].copy(), u[:, j].copy()
                    current = vals[i] + vals[j]

                    def pair(theta):
                        vi, vj = _rotate(ui, uj, theta, imaginary)
                        return sign * (term(vi) + term(vj))

                    scores = [pair(t) if t != 0.0 else current for t in grid]
                    k = int(np.argmax(scores))
                    theta, best = golden_section(pair, grid[k] - half, grid[k] + half,
                                                 cfg.step_tol)
                    if scores[k] > best:
                        theta, best = grid[k], scores[k]
                    if best > current + 1e-15:
                        vi, vj = _rotate(ui, uj, theta, imaginary)
                        u[:, i], u[:, j] = vi, vj
                        vals[i], vals[j] = sign * term(vi), sign * term(vj)
                        total = sum(vals)
        if total - start < cfg.value_tol:
            converged = True
            break
    return u, sign * total, sweeps, converged


def _restart_seeds(cfg: OptimizerConfig):
    return np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)


def _run_restarts(term, dim, cfg, maximize):
    seeds = _restart_seeds(cfg)

    def one(ss):
        return givens_search(term, haar_unitary(dim, np.random.default_rng(ss)), cfg, maximize)

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            runs = list(pool.map(one, seeds))
    else:
        runs = [one(ss) for ss in seeds]
    values = [r[1] for r in runs]
    best = 0
    for idx, v in enumerate(values):
        if (v > values[best]) if maximize else (v < values[best]):
            best = idx
    return runs, values, best


def _bipartite(rho: DensityMatrix) -> tuple[int, int]:
    if len(rho.dims) < 2:
        raise ArgumentError("a bipartite state is required")
    d_a = rho.dims[0]
    return d_a, rho.dim // d_a


def _in_basis(rho: DensityMatrix, basis: OrthonormalBasis | None) -> np.ndarray:
    d_a, d_b = _bipartite(rho)
    if basis is None or basis.is_computational():
        return rho.mat
    if basis.dim != d_a:
        raise ArgumentError("basis does not match subsystem A")
    w = np.kron(basis.matrix.conj().T, np.eye(d_b))
    return w @ rho.mat @ w.conj().T


def lqicc_lower_bound(rho: DensityMatrix, basis: OrthonormalBasis | None = None,
                      config: OptimizerConfig | None = None) -> BoundResult:
    """Best single-shot protocol: measure B, keep the label, read coherence on A.

    Maximizes ``sum_k p_k C_Z(rho_k^A)`` over rank-1 projective measurements
    on B, or over rank-1 POVMs realized as projective measurements on
    ``B (x) ancilla`` when ``config.parameterization == "povm"``. Everything
    else (B beyond subsystem 1) is treated as one joint B system.
    """
    cfg = config or OptimizerConfig()
    d_a, d_b = _bipartite(rho)
    r = _in_basis(rho, basis).reshape(d_a, d_b, d_a, d_b)
    d_anc = 1
    if cfg.parameterization == "povm":
        rank = int(np.linalg.matrix_rank(partial_trace(rho, [0]).mat, tol=1e-10))
        n_el = cfg.povm_elements or rank * rank
        d_anc = max(1, math.ceil(n_el / d_b))
    dim = d_b * d_anc
    check_capacity(dim, max_dim=256)

    def term(u):
        v = u[::d_anc]
        m = np.einsum("i,aibj,j->ab", v.conj(), r, v)
        m = (m + m.conj().T) / 2
        return shannon_bits(np.real(np.diag(m))) - entropy_bits(m)

    runs, values, best = _run_restarts(term, dim, cfg, maximize=True)
    u, value, sweeps, converged = runs[best]
    vectors = u[::d_anc, :]
    upper = delta_Z(rho, basis).value
    if value > upper + 1e-6:
        raise RuntimeError(f"lower bound {value} exceeds Delta_Z {upper}; "
                           "objective evaluation is inconsistent")
    value = min(max(value, 0.0), math.log2(d_a))
    povm = Povm.from_vectors(vectors.T)
    return BoundResult(value, povm, values, converged, best, sweeps,
                       kind=f"lqicc-{cfg.parameterization}", vectors=vectors)


def min_basis_delta(rho: DensityMatrix, config: OptimizerConfig | None = None) -> BoundResult:
    """Minimize Delta_Z over orthonormal bases of A (thermal discord A -> B).

    The result is an upper bound on the basis-independent recoverable
    coherence. Ties between restarts go to the lowest restart index.
    """
    cfg = config or OptimizerConfig()
    d_a, d_b = _bipartite(rho)
    r = rho.mat.reshape(d_a, d_b, d_a, d_b)
    s_rho = von_neumann_entropy(rho)

    def term(v):
        block = np.einsum("a,aibj,b->ij", v.conj(), r, v)
        return entropy_bits((block + block.conj().T) / 2)

    runs, values, best = _run_restarts(term, d_a, cfg, maximize=False)
    u, total, sweeps, converged = runs[best]
    value = min(max(total - s_rho, 0.0), math.log2(d_a))
    basis = OrthonormalBasis(_orthonormalize(u), validate=False)
    return BoundResult(value, basis, [v - s_rho for v in values], converged, best, sweeps,
                       kind="min-basis", vectors=basis.matrix)


def _orthonormalize(u: np.ndarray) -> np.ndarray:
    # undo accumulated rounding from many rotations
    q, rr = np.linalg.qr(u)
    return q * (np.diag(rr) / np.abs(np.diag(rr)))


class PureStateRecord(NamedTuple):
    delta: float                     # Delta_Z of |psi><psi|, exact recoverable coherence
    delta_after: float               # Delta_Z after the controlled translation
    schmidt_coeffs: np.ndarray
    weights: np.ndarray              # |<c|psi>|^2 summed over B, in the Z basis
    maximally_correlated: DensityMatrix   # T_c (psi (x) |0><0|) T_c^dag on A, B, B'
    certified: bool


def pure_state_recoverable(psi, dims, basis: OrthonormalBasis | None = None,
                           tol: float = 1e-9) -> PureStateRecord:
    """Recoverable coherence of a pure state via a controlled translation.

    Appending ``|0>`` on an ancilla B' of dimension d_A and applying
    ``T_c = sum_c |c><c| (x) 1_B (x) X^c`` turns ``|psi>`` into
    ``sum_c sqrt(p_c) |c>|e_c>`` with orthonormal ``|e_c>``, a maximally
    correlated state across A|BB'. Delta_Z must not change along the way.
    """
    v = np.asarray(psi, dtype=complex).ravel()
    dims = tuple(int(d) for d in dims)
    if len(dims) != 2 or v.size != dims[0] * dims[1]:
        raise ArgumentError(f"vector of length {v.size} does not match dims {dims}")
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise ArgumentError(f"state vector is not normalized (norm {np.linalg.norm(v)})")
    d_a, d_b = dims
    basis = OrthonormalBasis.computational(d_a) if basis is None else basis
    rho = DensityMatrix.from_ket(v, dims)
    schmidt = np.linalg.svd(v.reshape(d_a, d_b), compute_uv=False)
    before = delta_Z(rho, basis).value
    extended = tensor(rho, DensityMatrix.basis_state(0, [d_a]))
    after_state = apply(controlled_translation(d_a, d_a, basis), extended, on=[0, 2])
    after = delta_Z(after_state, basis).value
    amps = basis.matrix.conj().T @ v.reshape(d_a, d_b)
    weights = np.sum(np.abs(amps) ** 2, axis=1)
    return PureStateRecord(before, after, schmidt, weights, after_state,
                           abs(before - after) <= tol)


class UpperBoundReport(NamedTuple):
    delta: float
    lqicc_lower: float
    gap: float
    lower: BoundResult


def upper_bound_report(rho: DensityMatrix, basis: OrthonormalBasis | None = None,
                       config: OptimizerConfig | None = None) -> UpperBoundReport:
    """Both sides of the bound chain on recoverable coherence.

    Raises ``RuntimeError`` if the ordering ``delta >= lower - 1e-6`` fails.
    """
    delta = delta_Z(rho, basis).value
    lower = lqicc_lower_bound(rho, basis, config)
    if delta < lower.value - 1e-6:
        raise RuntimeError("bound ordering violated")
    return UpperBoundReport(delta, lower.value, delta - lower.value, lower)


def trivial_lower_bound(rho: DensityMatrix, basis: OrthonormalBasis | None = None) -> float:
    """Coherence of Tr_B rho: the protocol that ignores B."""
    return coherence_rel_ent(partial_trace(rho, [0]), basis)
