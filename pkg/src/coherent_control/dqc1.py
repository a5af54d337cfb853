"""DQC1 trace estimation with a general (possibly mixed) qubit probe.

Probe convention: ``rho_probe = [[p, (a/2) e^{i phase}], [(a/2) e^{-i phase}, 1 - p]]``
so ``a = 2|rho_01|`` and ``a = 1`` is the maximally coherent probe. After
the controlled unitary on a maximally mixed register, ``<sx> + i<sy> =
a e^{-i phase} Tr U / dim`` and the estimator divides that phase and ``a``
back out.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .config import settings
from .errors import ArgumentError, EstimatorUndefinedError
from .measures import coherence_rel_ent
from .states import DensityMatrix, check_capacity

__all__ = [
    "ProbeSpec", "Dqc1Exact", "Dqc1Report", "dqc1_exact", "dqc1_sample",
    "analytic_se", "precision_vs_coherence", "PrecisionRecord", "sweep",
    "SWEEP_COLUMNS",
]

_CHUNK = 1 << 16


@dataclass(frozen=True)
class ProbeSpec:
    p: float = 0.5
    a: float = 1.0
    phase: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0 or not 0.0 <= self.a <= 1.0:
            raise ArgumentError("probe needs p and a in [0, 1]")
        if self.p * (1 - self.p) < (self.a / 2) ** 2 - 1e-12:
            raise ArgumentError(f"p={self.p}, a={self.a} is not a valid qubit state "
                                "(needs p(1-p) >= (a/2)^2)")

    @property
    def matrix(self) -> np.ndarray:
        off = self.a / 2 * np.exp(1j * self.phase)
        return np.array([[self.p, off], [np.conj(off), 1 - self.p]])

    @property
    def state(self) -> DensityMatrix:
        return DensityMatrix((2,), self.matrix, validate=False)

    @property
    def coherence(self) -> float:
        return coherence_rel_ent(self.state)


class Dqc1Exact(NamedTuple):
    probe_state: np.ndarray     # reduced probe after the controlled unitary
    sx: float
    sy: float
    trace_over_dim: complex


def _check_unitary(u: np.ndarray) -> None:
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ArgumentError(f"unitary must be square, got shape {u.shape}")
    check_capacity(2 * u.shape[0])
    err = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
    if err > settings.tol.orth:
        raise ArgumentError(f"matrix is not unitary (error {err:.3g})")


def dqc1_exact(probe: ProbeSpec, u) -> Dqc1Exact:
    """Exact probe state after |0><0| (x) 1 + |1><1| (x) U on probe (x) 1/dim."""
    u = np.asarray(u, dtype=complex)
    _check_unitary(u)
    t = complex(np.trace(u) / u.shape[0])
    out = probe.matrix.astype(complex)
    out[0, 1] *= np.conj(t)
    out[1, 0] *= t
    return Dqc1Exact(out, float(2 * out[1, 0].real), float(2 * out[1, 0].imag), t)


def analytic_se(a: float, t: complex, n_per_pauli: float) -> float:
    """sqrt(2 - a^2 |t|^2) / (a sqrt(n)): error of the trace estimate."""
    if a <= 0:
        raise EstimatorUndefinedError("probe has no coherence (a = 0); estimator undefined")
    return math.sqrt(2 - a * a * abs(t) ** 2) / (a * math.sqrt(n_per_pauli))


@dataclass
class Dqc1Report:
    dim: int
    exact_trace_over_dim: complex
    estimate: complex
    n_runs: int                 # total probes, half per Pauli
    mean_sx: float
    mean_sy: float
    analytic_se: float
    empirical_se: float
    precision_bits: float
    probe_coherence_bits: float
    probe: ProbeSpec

    @property
    def error(self) -> float:
        return abs(self.estimate - self.exact_trace_over_dim)

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("exact_trace_over_dim", "estimate"):
            z = d.pop(key)
            d[key] = {"re": z.real, "im": z.imag}
        return d


def _sample_pauli(mean: float, n: int, seed: int, pauli: int) -> tuple[float, float]:
    """Draw n outcomes +-1 with P(+1) = (1 + mean)/2; returns (sum, sum of squares of deviations).

    Chunk ``j`` uses its own stream keyed by ``(seed, pauli, j)`` so results do not
    depend on evaluation order.
    """
    p_plus = (1.0 + mean) / 2
    sums = []
    for j, start in enumerate(range(0, n, _CHUNK)):
        size = min(_CHUNK, n - start)
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(pauli, j)))
        x = np.where(rng.random(size) < p_plus, 1.0, -1.0)
        sums.append(x.sum())
    total = float(math.fsum(sums))
    mean_hat = total / n
    # outcomes are +-1, so the sample variance only depends on the mean
    var = n / (n - 1) * (1.0 - mean_hat ** 2) if n > 1 else 0.0
    return mean_hat, max(var, 0.0)


def dqc1_sample(probe: ProbeSpec, u, n_runs: int, seed: int = 0) -> Dqc1Report:
    """Monte Carlo DQC1: ``n_runs`` fresh probes, half measured in sx, half in sy."""
    if n_runs < 2 or n_runs % 2:
        raise ArgumentError("n_runs must be an even number >= 2")
    if probe.a <= 0:
        raise EstimatorUndefinedError("probe has no coherence (a = 0); estimator undefined")
    exact = dqc1_exact(probe, u)
    n = n_runs // 2
    mx, vx = _sample_pauli(exact.sx, n, seed, 0)
    my, vy = _sample_pauli(exact.sy, n, seed, 1)
    estimate = complex(mx, my) * np.exp(1j * probe.phase) / probe.a
    se_a = analytic_se(probe.a, exact.trace_over_dim, n)
    se_e = math.sqrt(vx / n + vy / n) / probe.a
    return Dqc1Report(
        dim=int(np.asarray(u).shape[0]),
        exact_trace_over_dim=exact.trace_over_dim,
        estimate=complex(estimate),
        n_runs=n_runs,
        mean_sx=mx,
        mean_sy=my,
        analytic_se=se_a,
        empirical_se=se_e,
        precision_bits=-math.log2(se_a),
        probe_coherence_bits=probe.coherence,
        probe=probe,
    )


class PrecisionRecord(NamedTuple):
    a: float
    p: float
    m: int
    prec_emp: float
    prec_analytic: float
    half_log2_mC: float
    residual: float
    a_squared: float
    coherence_bits: float


def precision_vs_coherence(probe: ProbeSpec, u, m_probes: int, seed: int = 0) -> PrecisionRecord:
    """Precision of the trace estimate against (1/2) log2(m C_Z(probe)).

    ``m_probes`` counts probes per Pauli measurement, matching the standard
    error sqrt((2 - a^2|t|^2) / (a^2 m)).
    """
    if m_probes < 100:
        raise ArgumentError("m_probes must be at least 100")
    report = dqc1_sample(probe, u, 2 * m_probes, seed)
    coh = report.probe_coherence_bits
    prec_analytic = -math.log2(report.analytic_se)
    prec_emp = -math.log2(report.empirical_se) if report.empirical_se > 0 else math.inf
    half = 0.5 * math.log2(m_probes * coh) if coh > 0 else -math.inf
    return PrecisionRecord(probe.a, probe.p, m_probes, prec_emp, prec_analytic, half,
                           prec_analytic - half, probe.a ** 2, coh)


SWEEP_COLUMNS = ("a", "p", "m", "prec_emp", "prec_analytic", "half_log2_mC", "residual")


def sweep(a_values: Sequence[float], m_values: Sequence[int], u, p: float = 0.5,
          seed: int = 0) -> list[PrecisionRecord]:
    return [precision_vs_coherence(ProbeSpec(p=p, a=a), u, m, seed)
            for a in a_values for m in m_values]
