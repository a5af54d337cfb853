"""Kraus channels and the GOIA operation class.

A bipartite state carries the controlling system A as subsystem 0; every
other subsystem belongs to the controlled side B (ancillae and measurement
registers are appended at the end).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .config import settings
from .errors import (ArgumentError, DegenerateBranchError, InvalidChannelError,
                     ValidationError)
from .states import (DensityMatrix, OrthonormalBasis, as_rng, check_capacity, dephase,
                     haar_unitary, partial_trace, tensor)

__all__ = [
    "KrausChannel", "make_channel", "apply", "postselect", "IncoherenceCheck",
    "is_incoherent_channel", "controlled_unitary", "controlled_translation",
    "is_controlled_from_a", "Povm", "MeasurementRecord", "measure_on_B",
    "measure_with_register", "is_cq_state", "IncoherentOnA", "ControlledFromA",
    "AddAncillaB", "TraceB", "MeasureB", "GoiaProgram", "Branch", "ProgramOutcome",
    "random_incoherent_channel", "random_goia_program",
]


@dataclass(frozen=True, eq=False)
class KrausChannel:
    in_dims: tuple
    out_dims: tuple
    kraus: tuple
    trace_preserving: bool = True

    @property
    def n_kraus(self) -> int:
        return len(self.kraus)


def make_channel(kraus: Sequence, in_dims: Sequence[int],
                 out_dims: Sequence[int] | None = None) -> KrausChannel:
    """Validate Kraus operators and tag the channel TP or trace-non-increasing.

    Raises
    ------
    InvalidChannelError
        If ``sum K^dag K`` exceeds the identity by more than the tolerance.
    """
    in_dims = tuple(int(d) for d in in_dims)
    out_dims = in_dims if out_dims is None else tuple(int(d) for d in out_dims)
    din, dout = math.prod(in_dims), math.prod(out_dims)
    ops = []
    for i, k in enumerate(kraus):
        k = np.array(k, dtype=complex)
        if k.shape != (dout, din):
            raise ArgumentError(f"Kraus operator {i} has shape {k.shape}, "
                                f"expected {(dout, din)}")
        k.setflags(write=False)
        ops.append(k)
    if not ops:
        raise ArgumentError("a channel needs at least one Kraus operator")
    s = sum(k.conj().T @ k for k in ops)
    tol = settings.tol.cptp
    excess = float(np.linalg.eigvalsh(s - np.eye(din))[-1])
    if excess > tol:
        raise InvalidChannelError(f"sum of K^dag K exceeds the identity by {excess:.3g}")
    tp = float(np.max(np.abs(s - np.eye(din)))) <= tol
    return KrausChannel(in_dims, out_dims, tuple(ops), tp)


def _apply_ops(ops, rho: DensityMatrix, on, out_local) -> np.ndarray:
    dims = rho.dims
    n = len(dims)
    rest = [i for i in range(n) if i not in on]
    din = math.prod(dims[i] for i in on)
    drest = math.prod(dims[i] for i in rest)
    t = rho.mat.reshape(dims + dims)
    t = t.transpose(list(on) + rest + [n + i for i in on] + [n + i for i in rest])
    t = t.reshape(din, drest, din, drest)
    out = sum(np.einsum("oi,irjs,pj->orps", k, t, k.conj()) for k in ops)
    new_local = list(out_local)
    shape = new_local + [dims[i] for i in rest]
    out = out.reshape(shape + shape)
    order = list(on) + rest
    inv = np.argsort(order)
    m = len(order)
    out = out.transpose(list(inv) + [m + i for i in inv])
    new_dims = list(dims)
    for pos, d in zip(on, out_local):
        new_dims[pos] = d
    side = math.prod(new_dims)
    return tuple(new_dims), out.reshape(side, side)


def _resolve_targets(ch: KrausChannel, rho: DensityMatrix, on):
    if on is None:
        if tuple(rho.dims) != ch.in_dims:
            if math.prod(rho.dims) != math.prod(ch.in_dims):
                raise ArgumentError(f"channel input dims {ch.in_dims} do not match "
                                    f"state dims {rho.dims}")
        return None
    on = [int(i) for i in on]
    if len(set(on)) != len(on) or any(not 0 <= i < len(rho.dims) for i in on):
        raise ArgumentError(f"invalid target subsystems {on} for dims {rho.dims}")
    if tuple(rho.dims[i] for i in on) != ch.in_dims:
        raise ArgumentError(f"channel input dims {ch.in_dims} do not match target "
                            f"subsystems {on} of dims {rho.dims}")
    if len(ch.out_dims) != len(on):
        raise ArgumentError("local application needs one output factor per target")
    return on


def _evolve(ch: KrausChannel, rho: DensityMatrix, on):
    on = _resolve_targets(ch, rho, on)
    if on is None:
        m = sum(k @ rho.mat @ k.conj().T for k in ch.kraus)
        return ch.out_dims, m
    return _apply_ops(ch.kraus, rho, on, ch.out_dims)


def apply(ch: KrausChannel, rho: DensityMatrix, on: Sequence[int] | None = None) -> DensityMatrix:
    """Apply a trace-preserving channel, optionally on the subsystems ``on``.

    Trace-non-increasing channels must go through :func:`postselect` so the
    branch probability is never dropped silently.
    """
    if not ch.trace_preserving:
        raise InvalidChannelError("channel is trace-non-increasing; use postselect()")
    dims, m = _evolve(ch, rho, on)
    m = (m + m.conj().T) / 2
    return DensityMatrix(dims, m, validate=False)


def postselect(ch: KrausChannel, rho: DensityMatrix,
               on: Sequence[int] | None = None) -> tuple[DensityMatrix, float]:
    """Apply a (possibly trace-non-increasing) channel and renormalize.

    Returns the conditional state and the branch probability.
    """
    dims, m = _evolve(ch, rho, on)
    p = float(np.trace(m).real)
    if p < settings.tol.branch:
        raise DegenerateBranchError(f"branch probability {p:.3g} is zero")
    m = (m + m.conj().T) / (2 * p)
    return DensityMatrix(dims, m, validate=False), p


class IncoherenceCheck(NamedTuple):
    ok: bool
    witness: tuple | None = None   # (kraus index, column, rows with nonzero entries)

    def __bool__(self):
        return self.ok


def is_incoherent_channel(ch: KrausChannel, basis: OrthonormalBasis | None = None) -> IncoherenceCheck:
    """Check that every Kraus operator maps basis states to multiples of basis states.

    The operators are rewritten in ``basis`` first, then each column may hold
    at most one entry above the incoherence tolerance.
    """
    if ch.in_dims != ch.out_dims or len(ch.in_dims) != 1:
        raise ArgumentError("incoherence is defined for square single-system channels")
    d = ch.in_dims[0]
    basis = OrthonormalBasis.computational(d) if basis is None else basis
    if basis.dim != d:
        raise ArgumentError("basis dimension does not match the channel")
    V = basis.matrix
    for a, k in enumerate(ch.kraus):
        kz = V.conj().T @ k @ V
        nonzero = np.abs(kz) > settings.tol.incoherent
        for col in range(d):
            rows = np.flatnonzero(nonzero[:, col])
            if len(rows) > 1:
                return IncoherenceCheck(False, (a, col, tuple(int(r) for r in rows)))
    return IncoherenceCheck(True)


def _check_unitary(u: np.ndarray, what: str) -> None:
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ArgumentError(f"{what} must be square, got shape {u.shape}")
    err = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
    if err > settings.tol.orth:
        raise ArgumentError(f"{what} is not unitary (error {err:.3g})")


def controlled_unitary(basis: OrthonormalBasis, units: Sequence,
                       b_dims: Sequence[int] | None = None) -> KrausChannel:
    """The control unitary sum_c |c><c| (x) U_c with ``c`` running over ``basis``."""
    units = [np.asarray(u, dtype=complex) for u in units]
    if len(units) != basis.dim:
        raise ArgumentError(f"need {basis.dim} blocks, got {len(units)}")
    for c, u in enumerate(units):
        _check_unitary(u, f"block {c}")
    db = units[0].shape[0]
    if any(u.shape[0] != db for u in units):
        raise ArgumentError("all blocks must act on the same space")
    b_dims = (db,) if b_dims is None else tuple(int(d) for d in b_dims)
    if math.prod(b_dims) != db:
        raise ArgumentError(f"b_dims {b_dims} inconsistent with block size {db}")
    V = basis.matrix
    U = sum(np.kron(np.outer(V[:, c], V[:, c].conj()), u) for c, u in enumerate(units))
    return make_channel([U], (basis.dim,) + b_dims)


def controlled_translation(d_a: int, d_anc: int,
                           basis: OrthonormalBasis | None = None) -> KrausChannel:
    """T_c = sum_i |i><i| (x) sum_k |i+k mod d_anc><k| on A (x) ancilla."""
    if d_anc < d_a:
        raise ArgumentError(f"ancilla dimension {d_anc} must be at least {d_a}")
    basis = OrthonormalBasis.computational(d_a) if basis is None else basis
    shift = np.roll(np.eye(d_anc), 1, axis=0)
    units = [np.linalg.matrix_power(shift, i) for i in range(d_a)]
    return controlled_unitary(basis, units)


def is_controlled_from_a(ch: KrausChannel, basis: OrthonormalBasis | None = None) -> bool:
    """True if ``ch`` is a single unitary commuting with every |c><c| (x) 1."""
    if ch.n_kraus != 1 or ch.in_dims != ch.out_dims:
        return False
    u = ch.kraus[0]
    try:
        _check_unitary(u, "controlled operation")
    except ArgumentError:
        return False
    d_a = ch.in_dims[0]
    basis = OrthonormalBasis.computational(d_a) if basis is None else basis
    db = u.shape[0] // d_a
    for c in range(d_a):
        pc = np.kron(np.outer(basis.matrix[:, c], basis.matrix[:, c].conj()), np.eye(db))
        if np.max(np.abs(pc @ u - u @ pc)) > settings.tol.orth:
            return False
    return True


class Povm:
    """Positive operators ``E_k`` summing to the identity.

    Measurements use the Lueders instrument ``sqrt(E_k)`` unless explicit
    Kraus operators are supplied through :meth:`from_kraus`.
    """

    def __init__(self, elements: Sequence, kraus: Sequence | None = None):
        els = [np.array(e, dtype=complex) for e in elements]
        if not els:
            raise ArgumentError("empty POVM")
        d = els[0].shape[0]
        tol = settings.tol
        for i, e in enumerate(els):
            if e.shape != (d, d):
                raise ArgumentError(f"POVM element {i} has shape {e.shape}")
            if np.max(np.abs(e - e.conj().T)) > tol.herm or np.linalg.eigvalsh(e)[0] < -tol.psd:
                raise ValidationError(f"POVM element {i} is not positive semidefinite",
                                      invariant="positive-semidefinite")
        total = sum(els)
        if np.max(np.abs(total - np.eye(d))) > tol.cptp:
            raise InvalidChannelError("POVM elements do not sum to the identity")
        self.elements = tuple(els)
        if kraus is None:
            kraus = [_psd_sqrt(e) for e in els]
        self.kraus = tuple(np.asarray(k, dtype=complex) for k in kraus)
        self.rank1 = all(np.linalg.matrix_rank(e, tol=1e-10) <= 1 for e in els)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self):
        return len(self.elements)

    @classmethod
    def from_kraus(cls, kraus: Sequence) -> "Povm":
        ks = [np.asarray(k, dtype=complex) for k in kraus]
        return cls([k.conj().T @ k for k in ks], kraus=ks)

    @classmethod
    def projective(cls, unitary) -> "Povm":
        """Rank-1 projective measurement onto the columns of ``unitary``."""
        u = np.asarray(unitary, dtype=complex)
        return cls([np.outer(u[:, k], u[:, k].conj()) for k in range(u.shape[1])])

    @classmethod
    def from_vectors(cls, vectors: Sequence) -> "Povm":
        """Rank-1 POVM ``E_k = |v_k><v_k|`` from (subnormalized) vectors."""
        return cls([np.outer(v, np.conj(v)) for v in vectors])


def _psd_sqrt(m):
    w, v = np.linalg.eigh(m)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


class MeasurementRecord(NamedTuple):
    outcome: int
    state: DensityMatrix | None   # None for zero-probability outcomes
    probability: float


def _check_povm_target(rho: DensityMatrix, povm: Povm, subsystem: int) -> None:
    if not 1 <= subsystem < len(rho.dims):
        raise ArgumentError(f"measurement target {subsystem} is not a B subsystem of {rho.dims}")
    if rho.dims[subsystem] != povm.dim:
        raise ArgumentError(f"POVM dimension {povm.dim} does not match subsystem "
                            f"dimension {rho.dims[subsystem]}")


def measure_on_B(rho: DensityMatrix, povm: Povm, subsystem: int = 1) -> list[MeasurementRecord]:
    """Measure a B subsystem; one record per outcome with Born probability."""
    _check_povm_target(rho, povm, subsystem)
    records = []
    for k, op in enumerate(povm.kraus):
        dims, m = _apply_ops([op], rho, [subsystem], [povm.dim])
        p = float(np.trace(m).real)
        if p < settings.tol.branch:
            records.append(MeasurementRecord(k, None, max(p, 0.0)))
            continue
        m = (m + m.conj().T) / (2 * p)
        records.append(MeasurementRecord(k, DensityMatrix(dims, m, validate=False), p))
    return records


def measure_with_register(rho: DensityMatrix, povm: Povm, subsystem: int = 1) -> DensityMatrix:
    """Measurement channel writing the outcome into a classical register.

    The register is appended as the last subsystem:
    ``sum_k (M_k rho M_k^dag) (x) |k><k|``.
    """
    _check_povm_target(rho, povm, subsystem)
    n = len(povm)
    check_capacity(rho.dim * n)
    out = np.zeros((rho.dim * n, rho.dim * n), dtype=complex)
    for k, op in enumerate(povm.kraus):
        _, m = _apply_ops([op], rho, [subsystem], [povm.dim])
        reg = np.zeros((n, n))
        reg[k, k] = 1.0
        out += np.kron(m, reg)
    out = (out + out.conj().T) / 2
    return DensityMatrix(rho.dims + (n,), out, validate=False)


def is_cq_state(rho: DensityMatrix, basis: OrthonormalBasis | None = None,
                tol: float = 1e-9, subsystem: int = 0) -> bool:
    """Frobenius distance between ``rho`` and its dephasing is at most ``tol``."""
    if len(rho.dims) < 2:
        raise ArgumentError("is_cq_state expects a multipartite state")
    diff = rho.mat - dephase(rho, basis, subsystem).mat
    return bool(np.linalg.norm(diff) <= tol)


# --- GOIA programs ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class IncoherentOnA:
    channel: KrausChannel
    kind = "IncoherentOnA"


@dataclass(frozen=True, eq=False)
class ControlledFromA:
    blocks: tuple
    targets: tuple = (1,)
    kind = "ControlledFromA"

    @classmethod
    def from_channel(cls, ch: KrausChannel, targets: Sequence[int],
                     basis: OrthonormalBasis | None = None) -> "ControlledFromA":
        """Extract the blocks ``<c|U|c>`` of a controlled unitary acting on A (x) targets."""
        if not is_controlled_from_a(ch, basis):
            raise ValidationError("channel is not a unitary controlled in the incoherent basis",
                                  invariant="controlled-from-A")
        d_a = ch.in_dims[0]
        basis = OrthonormalBasis.computational(d_a) if basis is None else basis
        u = ch.kraus[0]
        db = u.shape[0] // d_a
        blocks = []
        for c in range(d_a):
            v = np.kron(basis.matrix[:, c].reshape(-1, 1), np.eye(db))
            blocks.append(v.conj().T @ u @ v)
        return cls(tuple(blocks), tuple(targets))


@dataclass(frozen=True)
class AddAncillaB:
    dim: int
    kind = "AddAncillaB"


@dataclass(frozen=True)
class TraceB:
    index: int
    kind = "TraceB"


@dataclass(frozen=True, eq=False)
class MeasureB:
    index: int
    povm: Povm
    register: bool = False
    kind = "MeasureB"


class Branch(NamedTuple):
    probability: float
    state: DensityMatrix


class ProgramOutcome(NamedTuple):
    branches: list
    skipped: int          # zero-probability branches dropped along the way

    @property
    def total_probability(self) -> float:
        return float(sum(b.probability for b in self.branches))


@dataclass(frozen=True, eq=False)
class GoiaProgram:
    """A finite sequence of GOIA steps for states with input dims ``in_dims``.

    ``MeasureB`` steps without a register fork the evaluation into one branch
    per outcome; with ``register=True`` the outcome is written to a classical
    register appended to the dims and no fork happens.
    """

    in_dims: tuple
    steps: tuple
    basis: OrthonormalBasis = field(default=None)

    def __post_init__(self):
        if self.basis is None:
            object.__setattr__(self, "basis", OrthonormalBasis.computational(self.in_dims[0]))
        object.__setattr__(self, "in_dims", tuple(int(d) for d in self.in_dims))
        object.__setattr__(self, "steps", tuple(self.steps))

    def validate(self) -> tuple:
        """Check every step structurally; returns the output dims."""
        dims = list(self.in_dims)
        if self.basis.dim != dims[0]:
            raise ValidationError("basis does not match subsystem A", invariant="basis-dim")
        for i, step in enumerate(self.steps):
            where = f"step {i} ({step.kind})"
            if isinstance(step, IncoherentOnA):
                if step.channel.in_dims != (dims[0],) or not step.channel.trace_preserving:
                    raise ValidationError(f"{where}: channel must be TP on A", invariant="shape")
                check = is_incoherent_channel(step.channel, self.basis)
                if not check:
                    raise ValidationError(f"{where}: Kraus operator not incoherent, "
                                          f"witness {check.witness}", invariant="incoherent")
            elif isinstance(step, ControlledFromA):
                if not step.targets or any(not 1 <= t < len(dims) for t in step.targets):
                    raise ValidationError(f"{where}: invalid targets {step.targets}",
                                          invariant="shape")
                db = math.prod(dims[t] for t in step.targets)
                if len(step.blocks) != dims[0]:
                    raise ValidationError(f"{where}: need one block per basis state",
                                          invariant="controlled-from-A")
                for c, u in enumerate(step.blocks):
                    u = np.asarray(u)
                    if u.shape != (db, db):
                        raise ValidationError(f"{where}: block {c} has shape {u.shape}",
                                              invariant="shape")
                    try:
                        _check_unitary(u, f"block {c}")
                    except ArgumentError as exc:
                        raise ValidationError(f"{where}: {exc}",
                                              invariant="controlled-from-A") from exc
            elif isinstance(step, AddAncillaB):
                if step.dim < 1:
                    raise ValidationError(f"{where}: bad ancilla dim", invariant="shape")
                dims.append(step.dim)
            elif isinstance(step, TraceB):
                if not 1 <= step.index < len(dims):
                    raise ValidationError(f"{where}: can only trace out B subsystems",
                                          invariant="shape")
                del dims[step.index]
            elif isinstance(step, MeasureB):
                if not 1 <= step.index < len(dims) or dims[step.index] != step.povm.dim:
                    raise ValidationError(f"{where}: POVM does not fit subsystem {step.index}",
                                          invariant="shape")
                if step.register:
                    dims.append(len(step.povm))
            else:
                raise ValidationError(f"{where}: unknown step type", invariant="step-kind")
        return tuple(dims)

    def _step(self, step, rho: DensityMatrix) -> list:
        if isinstance(step, IncoherentOnA):
            return [(1.0, apply(step.channel, rho, on=[0]))]
        if isinstance(step, ControlledFromA):
            db = [rho.dims[t] for t in step.targets]
            ch = controlled_unitary(self.basis, step.blocks, db)
            return [(1.0, apply(ch, rho, on=[0, *step.targets]))]
        if isinstance(step, AddAncillaB):
            return [(1.0, tensor(rho, DensityMatrix.basis_state(0, [step.dim])))]
        if isinstance(step, TraceB):
            keep = [i for i in range(len(rho.dims)) if i != step.index]
            return [(1.0, partial_trace(rho, keep))]
        if step.register:
            return [(1.0, measure_with_register(rho, step.povm, step.index))]
        return [(r.probability, r.state) for r in measure_on_B(rho, step.povm, step.index)]

    def run(self, rho: DensityMatrix) -> ProgramOutcome:
        if rho.dims != self.in_dims:
            raise ArgumentError(f"program expects dims {self.in_dims}, got {rho.dims}")
        branches = [(1.0, rho)]
        skipped = 0
        for step in self.steps:
            nxt = []
            for p, state in branches:
                for q, out in self._step(step, state):
                    if out is None or p * q < settings.tol.branch:
                        skipped += 1
                        continue
                    nxt.append((p * q, out))
            branches = nxt
        return ProgramOutcome([Branch(p, s) for p, s in branches], skipped)


def random_incoherent_channel(dim: int, basis: OrthonormalBasis | None = None,
                              seed=None, n_kraus: int | None = None) -> KrausChannel:
    """Random TP channel whose Kraus operators are incoherent in ``basis``.

    Draw operators with one entry per column (random column map, amplitudes
    and phases), rescale so that ``sum K^dag K <= 1`` and complete with the
    rank-one operators ``sqrt(l_i) |g_i><w_i|`` built from the eigenpairs of
    the remainder. Those are incoherent too: every column lands on row g_i.
    """
    rng = as_rng(seed)
    basis = OrthonormalBasis.computational(dim) if basis is None else basis
    n = int(rng.integers(1, 4)) if n_kraus is None else n_kraus
    ops = []
    cols = np.arange(dim)
    for _ in range(n):
        k = np.zeros((dim, dim), dtype=complex)
        rows = rng.integers(0, dim, size=dim)
        amps = rng.random(dim)
        k[rows, cols] = amps * np.exp(2j * np.pi * rng.random(dim))
        ops.append(k)
    s = sum(k.conj().T @ k for k in ops)
    top = float(np.linalg.eigvalsh(s)[-1])
    if top > 0:
        scale = 1.0 / math.sqrt(top * (1.0 + rng.random()))
        ops = [k * scale for k in ops]
        s = s * scale**2
    w, v = np.linalg.eigh(np.eye(dim) - s)
    for lam, vec in zip(w, v.T):
        if lam > 1e-15:
            g = int(rng.integers(dim))
            row = np.zeros(dim, dtype=complex)
            row[g] = math.sqrt(lam) * np.exp(2j * np.pi * rng.random())
            ops.append(np.outer(row, vec.conj()))
    V = basis.matrix
    ops = [V @ k @ V.conj().T for k in ops]
    return make_channel(ops, (dim,))


STEP_KINDS = ("IncoherentOnA", "ControlledFromA", "AddAncillaB", "TraceB", "MeasureB")


def random_goia_program(dims: Sequence[int], depth: int, seed=None,
                        basis: OrthonormalBasis | None = None,
                        max_total_dim: int = 48) -> GoiaProgram:
    """Random GOIA program for property tests; deterministic per seed.

    Registers written by measurements are never touched by later steps, so
    they stay classical.
    """
    if depth < 1:
        raise ArgumentError("depth must be at least 1")
    in_dims = tuple(int(d) for d in dims)
    dims = list(in_dims)
    if len(dims) < 2:
        raise ArgumentError("need a bipartite input (A plus at least one B subsystem)")
    rng = as_rng(seed)
    basis = OrthonormalBasis.computational(dims[0]) if basis is None else basis
    registers: set[int] = set()
    steps = []
    while len(steps) < depth:
        total = math.prod(dims)
        quantum_b = [i for i in range(1, len(dims)) if i not in registers]
        kind = STEP_KINDS[int(rng.integers(len(STEP_KINDS)))]
        if kind == "IncoherentOnA":
            steps.append(IncoherentOnA(random_incoherent_channel(dims[0], basis, rng)))
        elif kind == "ControlledFromA":
            if not quantum_b:
                continue
            k = int(rng.integers(1, len(quantum_b) + 1))
            targets = tuple(sorted(rng.choice(quantum_b, size=k, replace=False).tolist()))
            db = math.prod(dims[t] for t in targets)
            blocks = tuple(haar_unitary(db, rng) for _ in range(dims[0]))
            steps.append(ControlledFromA(blocks, targets))
        elif kind == "AddAncillaB":
            d = int(rng.integers(2, 4))
            if total * d > max_total_dim:
                continue
            steps.append(AddAncillaB(d))
            dims.append(d)
        elif kind == "TraceB":
            if len(quantum_b) < 2:
                continue
            idx = int(rng.choice(quantum_b))
            steps.append(TraceB(idx))
            del dims[idx]
            registers = {r - 1 if r > idx else r for r in registers}
        else:
            if not quantum_b:
                continue
            idx = int(rng.choice(quantum_b))
            povm = Povm.projective(haar_unitary(dims[idx], rng))
            register = bool(rng.random() < 0.5) and total * len(povm) <= max_total_dim
            steps.append(MeasureB(idx, povm, register))
            if register:
                registers.add(len(dims))
                dims.append(len(povm))
    return GoiaProgram(in_dims, tuple(steps), basis)
