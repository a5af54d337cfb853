"""Dense states on explicitly dimensioned multipartite Hilbert spaces.

Everything here is a pure function of its inputs. Entropies are in bits.
Subsystem 0 plays the role of the controlling system A unless a function
takes an explicit ``subsystem`` argument.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from .config import settings
from .errors import ArgumentError, CapacityError, ValidationError

__all__ = [
    "DensityMatrix", "OrthonormalBasis", "Spectrum",
    "tensor", "partial_trace", "eig_hermitian", "von_neumann_entropy",
    "relative_entropy", "fidelity", "dephase", "random_state", "haar_unitary",
    "as_rng", "check_capacity", "shannon_bits", "entropy_bits",
]


def as_rng(seed) -> np.random.Generator:
    """Accept an int seed, a ``SeedSequence`` or an existing ``Generator``."""
    return np.random.default_rng(seed)


def check_capacity(total_dim: int, max_dim: int | None = None) -> None:
    cap = settings.max_dim if max_dim is None else max_dim
    if total_dim > cap:
        raise CapacityError(f"total dimension {total_dim} exceeds the configured "
                            f"maximum {cap}")


def _herm_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix with subsystem dims.

    The matrix is stored read-only; operations return new instances.

    Parameters
    ----------
    dims : sequence of int
        Dimensions of the subsystems, e.g. ``(d_A, d_B)``.
    mat : array_like
        Square complex matrix of side ``prod(dims)``.
    validate : bool
        Check Hermiticity, positivity and trace against the active
        tolerance profile. Internal code that has already produced a valid
        state may skip it.
    """

    __slots__ = ("dims", "mat")

    def __init__(self, dims: Sequence[int], mat, validate: bool = True):
        dims = tuple(int(d) for d in dims)
        if not dims or any(d < 1 for d in dims):
            raise ArgumentError(f"invalid subsystem dimensions {dims}")
        total = math.prod(dims)
        check_capacity(total)
        m = np.array(mat, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ArgumentError(f"density matrix must be square, got shape {m.shape}")
        if m.shape[0] != total:
            raise ArgumentError(f"matrix side {m.shape[0]} inconsistent with dims {dims}")
        if validate:
            _validate_state(m)
        m.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "mat", m)

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    def __repr__(self):
        return f"DensityMatrix(dims={self.dims})"

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def from_ket(cls, psi, dims: Sequence[int]) -> "DensityMatrix":
        v = np.asarray(psi, dtype=complex).ravel()
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > settings.tol.trace:
            raise ArgumentError(f"state vector is not normalized (norm {norm})")
        return cls(dims, np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, dims: Sequence[int]) -> "DensityMatrix":
        d = math.prod(dims)
        return cls(dims, np.eye(d) / d, validate=False)

    @classmethod
    def basis_state(cls, index: int, dims: Sequence[int]) -> "DensityMatrix":
        d = math.prod(dims)
        m = np.zeros((d, d), dtype=complex)
        m[index, index] = 1.0
        return cls(dims, m, validate=False)


def _validate_state(m: np.ndarray) -> None:
    tol = settings.tol
    defect = _herm_defect(m)
    if defect > tol.herm:
        raise ValidationError(f"matrix is not Hermitian (max |M - M^dag| = {defect:.3g})",
                              invariant="hermitian")
    tr = np.trace(m)
    if abs(tr - 1.0) > tol.trace:
        raise ValidationError(f"trace is {tr.real:.12g}, expected 1", invariant="unit-trace")
    lo = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
    if lo < -tol.psd:
        raise ValidationError(f"matrix has negative eigenvalue {lo:.3g}",
                              invariant="positive-semidefinite")


class OrthonormalBasis:
    """Ordered orthonormal basis, stored as the columns of a unitary matrix."""

    __slots__ = ("matrix",)

    def __init__(self, vectors, validate: bool = True):
        m = np.array(vectors, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ArgumentError(f"a basis needs exactly dim vectors of length dim, "
                                f"got array of shape {m.shape}")
        if validate:
            err = float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))
            if err > settings.tol.orth:
                raise ValidationError(f"basis vectors are not orthonormal (error {err:.3g})",
                                      invariant="orthonormal")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __setattr__(self, name, value):
        raise AttributeError("OrthonormalBasis is immutable")

    def __repr__(self):
        return f"OrthonormalBasis(dim={self.dim})"

    @classmethod
    def computational(cls, dim: int) -> "OrthonormalBasis":
        return cls(np.eye(dim), validate=False)

    @classmethod
    def from_vectors(cls, vectors: Sequence) -> "OrthonormalBasis":
        """Build from a list of vectors (rows of the input become columns)."""
        return cls(np.array(vectors, dtype=complex).T)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def vectors(self) -> list[np.ndarray]:
        return [self.matrix[:, k] for k in range(self.dim)]

    def is_computational(self) -> bool:
        return bool(np.allclose(self.matrix, np.eye(self.dim), atol=0, rtol=0))


class Spectrum(NamedTuple):
    values: np.ndarray   # descending
    vectors: np.ndarray  # columns are eigenvectors


def _matrix(m) -> np.ndarray:
    return m.mat if isinstance(m, DensityMatrix) else np.asarray(m, dtype=complex)


def eig_hermitian(m) -> Spectrum:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues descending."""
    a = _matrix(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ArgumentError(f"expected a square matrix, got shape {a.shape}")
    if _herm_defect(a) > settings.tol.herm:
        raise ArgumentError("eig_hermitian requires a Hermitian matrix")
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    return Spectrum(w[::-1].copy(), v[:, ::-1].copy())


def shannon_bits(x) -> float:
    """-sum x log2 x over entries, with clamping of numerical noise.

    Inputs need not be normalized; this is the unnormalized "eta sum" used
    by the optimizers' per-column objectives.
    """
    x = np.asarray(x, dtype=float)
    x = x[x > settings.tol.eig_clamp]
    return float(-np.sum(x * np.log2(x)))


def entropy_bits(m: np.ndarray) -> float:
    """-Tr m log2 m for a Hermitian PSD (possibly subnormalized) matrix."""
    return shannon_bits(np.linalg.eigvalsh(m))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """S(rho) = -Tr rho log2 rho in bits."""
    return max(entropy_bits(_matrix(rho)), 0.0)


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """S(rho||sigma) in bits; ``math.inf`` when supp(rho) is not inside supp(sigma)."""
    if rho.dims != sigma.dims:
        raise ArgumentError(f"dimension mismatch {rho.dims} vs {sigma.dims}")
    tol = settings.tol
    w, v = np.linalg.eigh(sigma.mat)
    kernel = v[:, w <= tol.supp]
    if kernel.shape[1]:
        leak = kernel.conj().T @ rho.mat @ kernel
        if np.linalg.norm(leak) > tol.supp_leak:
            return math.inf
    support = w > tol.supp
    vs = v[:, support]
    weights = np.real(np.einsum("ij,ik,kj->j", vs.conj(), rho.mat, vs))
    cross = float(np.sum(weights * np.log2(w[support])))
    return max(-von_neumann_entropy(rho) - cross, 0.0)


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2."""
    if rho.dims != sigma.dims:
        raise ArgumentError(f"dimension mismatch {rho.dims} vs {sigma.dims}")
    s = _psd_sqrt(rho.mat)
    inner = s @ sigma.mat @ s
    w = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    f = float(np.sum(np.sqrt(np.clip(w, 0, None))) ** 2)
    return min(max(f, 0.0), 1.0)


def tensor(*states: DensityMatrix) -> DensityMatrix:
    """Kronecker product; dims are concatenated in argument order."""
    if not states:
        raise ArgumentError("tensor needs at least one state")
    dims = sum((s.dims for s in states), ())
    check_capacity(math.prod(dims))
    m = states[0].mat
    for s in states[1:]:
        m = np.kron(m, s.mat)
    return DensityMatrix(dims, m, validate=False)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduced state on the subsystems listed in ``keep`` (kept in ascending order)."""
    keep = sorted({int(k) for k in keep})
    n = len(rho.dims)
    if not keep:
        raise ArgumentError("partial_trace needs a nonempty set of subsystems to keep")
    if keep[0] < 0 or keep[-1] >= n:
        raise ArgumentError(f"subsystem indices {keep} out of range for dims {rho.dims}")
    traced = [i for i in range(n) if i not in keep]
    t = rho.mat.reshape(rho.dims + rho.dims)
    t = t.transpose(keep + traced + [n + i for i in keep] + [n + i for i in traced])
    dk = math.prod(rho.dims[i] for i in keep)
    dt = math.prod(rho.dims[i] for i in traced)
    t = t.reshape(dk, dt, dk, dt)
    out = np.einsum("ajbj->ab", t)
    return DensityMatrix([rho.dims[i] for i in keep], out, validate=False)


def _local_view(mat: np.ndarray, dims: tuple, k: int) -> np.ndarray:
    before = math.prod(dims[:k])
    after = math.prod(dims[k + 1:])
    return mat.reshape(before, dims[k], after, before, dims[k], after)


def dephase(rho: DensityMatrix, basis: OrthonormalBasis | None = None,
            subsystem: int = 0) -> DensityMatrix:
    """Completely decohere ``subsystem`` in ``basis``: sum_c Pi_c rho Pi_c.

    ``Pi_c = |c><c|`` on the chosen subsystem, identity elsewhere.
    """
    if not 0 <= subsystem < len(rho.dims):
        raise ArgumentError(f"subsystem {subsystem} out of range for dims {rho.dims}")
    d = rho.dims[subsystem]
    if basis is None:
        basis = OrthonormalBasis.computational(d)
    if basis.dim != d:
        raise ArgumentError(f"basis of dimension {basis.dim} does not match "
                            f"subsystem dimension {d}")
    t = _local_view(rho.mat, rho.dims, subsystem)
    V = basis.matrix
    computational = basis.is_computational()
    if not computational:
        t = np.einsum("xi,aibcjd,jy->axbcyd", V.conj().T, t, V)
    mask = np.eye(d, dtype=bool)[None, :, None, None, :, None]
    t = np.where(mask, t, 0)
    if not computational:
        t = np.einsum("xi,aibcjd,jy->axbcyd", V, t, V.conj().T)
    return DensityMatrix(rho.dims, t.reshape(rho.mat.shape), validate=False)


def random_state(dims: Sequence[int], rank: int | None = None, seed=None) -> DensityMatrix:
    """Random density matrix of the given rank (Ginibre construction).

    ``rank=None`` gives full rank; ``rank=1`` gives a Haar-random pure state.
    """
    dims = tuple(int(d) for d in dims)
    d = math.prod(dims)
    check_capacity(d)
    rank = d if rank is None else int(rank)
    if not 1 <= rank <= d:
        raise ArgumentError(f"rank {rank} out of range 1..{d}")
    rng = as_rng(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return DensityMatrix(dims, m / np.trace(m).real, validate=False)


def haar_unitary(dim: int, seed=None) -> np.ndarray:
    """Haar-random unitary: QR of a complex Ginibre matrix, phases fixed by diag(R)."""
    if dim < 1:
        raise ArgumentError("dimension must be positive")
    rng = as_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph
