"""Named states used by tests and the CLI.

The JSON copies under ``fixtures/`` are generated from these constructors
(``python -m coherent_control.fixtures``); a test keeps the two in sync.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .states import DensityMatrix

FIXTURE_DIR = Path(__file__).parent / "fixtures"

_S2 = np.sqrt(0.5)
UP, DOWN = np.array([1.0, 0.0]), np.array([0.0, 1.0])
LEFT, RIGHT = np.array([_S2, -_S2]), np.array([_S2, _S2])
PLUS = RIGHT


def _proj(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def qutrit_qubit_mixture() -> DensityMatrix:
    """(1/2)|phi><phi| (x) |0><0| + (1/2)|chi><chi| (x) |+><+| on a qutrit (x) qubit,
    with |phi> = (|0>+|1>)/sqrt2 and |chi> = (|1>+|2>)/sqrt2."""
    phi = np.array([1, 1, 0]) * _S2
    chi = np.array([0, 1, 1]) * _S2
    m = 0.5 * np.kron(_proj(phi), _proj(UP)) + 0.5 * np.kron(_proj(chi), _proj(PLUS))
    return DensityMatrix((3, 2), m)


def basis_dependent_example(eps: float = 0.01) -> DensityMatrix:
    """eps |up,up><.| + (1-eps)/2 (|left,up><.| + |right,down><.|)."""
    m = (eps * np.kron(_proj(UP), _proj(UP))
         + (1 - eps) / 2 * (np.kron(_proj(LEFT), _proj(UP)) + np.kron(_proj(RIGHT), _proj(DOWN))))
    return DensityMatrix((2, 2), m)


def maximally_correlated_psi(weight: float = 0.9) -> np.ndarray:
    return np.array([np.sqrt(weight), 0, 0, np.sqrt(1 - weight)], dtype=complex)


def maximally_correlated(weight: float = 0.9) -> DensityMatrix:
    """sqrt(w)|00> + sqrt(1-w)|11>."""
    return DensityMatrix.from_ket(maximally_correlated_psi(weight), (2, 2))


def singlet() -> DensityMatrix:
    return DensityMatrix.from_ket(np.array([0, 1, -1, 0]) * _S2, (2, 2))


def bell_phi_plus() -> DensityMatrix:
    return DensityMatrix.from_ket(np.array([1, 0, 0, 1]) * _S2, (2, 2))


def plus_zero() -> DensityMatrix:
    """|+> on A, |0> on B."""
    return DensityMatrix((2, 2), np.kron(_proj(PLUS), _proj(UP)))


def product_mixed() -> DensityMatrix:
    """rho_A (x) rho_B with rho_A mixed and not diagonal in the computational basis."""
    rho_a = np.array([[0.75, 0.25], [0.25, 0.25]])
    rho_b = np.diag([0.6, 0.4])
    return DensityMatrix((2, 2), np.kron(rho_a, rho_b))


def cq_example() -> DensityMatrix:
    """0.3 |0><0| (x) |+><+| + 0.7 |1><1| (x) diag(0.2, 0.8)."""
    m = 0.3 * np.kron(_proj(UP), _proj(PLUS)) + 0.7 * np.kron(_proj(DOWN), np.diag([0.2, 0.8]))
    return DensityMatrix((2, 2), m)


def qc_example() -> DensityMatrix:
    """Quantum-classical: 0.4 |+><+| (x) |0><0| + 0.6 rho (x) |1><1|, rho partly coherent."""
    rho = np.array([[0.7, 0.3 - 0.1j], [0.3 + 0.1j, 0.3]])
    m = 0.4 * np.kron(_proj(PLUS), _proj(UP)) + 0.6 * np.kron(rho, _proj(DOWN))
    return DensityMatrix((2, 2), m)


NAMED = {
    "qutrit_qubit_mixture": qutrit_qubit_mixture,
    "basis_dependent_example": basis_dependent_example,
    "maximally_correlated": maximally_correlated,
    "singlet": singlet,
    "bell_phi_plus": bell_phi_plus,
    "plus_zero": plus_zero,
    "product_mixed": product_mixed,
    "cq_example": cq_example,
    "qc_example": qc_example,
}


def fixture_path(name: str) -> Path:
    if name not in NAMED:
        raise KeyError(f"unknown fixture {name!r}")
    return FIXTURE_DIR / f"{name}.json"


def write_all(directory: Path = FIXTURE_DIR) -> list[Path]:
    from .io import save_state

    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, make in NAMED.items():
        path = directory / f"{name}.json"
        save_state(make(), path)
        paths.append(path)
    return paths


if __name__ == "__main__":
    for p in write_all():
        print(p)
