"""Seeded property suites shared by the test-suite and ``verify``.

Each instance draws its randomness from its own child of
``SeedSequence(seed)``, so a suite gives the same answer whatever the thread
count or evaluation order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .channels import random_goia_program
from .dqc1 import ProbeSpec, dqc1_sample
from .measures import (additivity_check, convexity_check, delta_Z, monotonicity_check,
                       random_cq_state)
from .optimize import pure_state_recoverable
from .states import DensityMatrix, OrthonormalBasis, haar_unitary, random_state

__all__ = ["SuiteResult", "SUITES", "run_suite"]


@dataclass
class SuiteResult:
    suite: str
    n: int
    passed: bool
    worst: float
    threshold: float
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "n": self.n, "passed": self.passed,
                "worst": self.worst, "threshold": self.threshold, "details": self.details}


def _map(fn: Callable, n: int, seed: int, threads: int) -> list:
    children = np.random.SeedSequence(seed).spawn(n)
    rngs = [np.random.default_rng(c) for c in children]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, rngs))
    return [fn(r) for r in rngs]


def _random_basis(d: int, rng) -> OrthonormalBasis:
    if rng.random() < 0.5:
        return OrthonormalBasis.computational(d)
    return OrthonormalBasis(haar_unitary(d, rng), validate=False)


def _random_dims(rng, choices=((2, 2), (2, 3), (3, 2))) -> tuple:
    return choices[int(rng.integers(len(choices)))]


def monotonicity(n: int = 500, seed: int = 0, threads: int = 1, max_depth: int = 6) -> SuiteResult:
    def one(rng):
        dims = _random_dims(rng)
        basis = _random_basis(dims[0], rng)
        rank = int(rng.integers(1, dims[0] * dims[1] + 1))
        rho = random_state(dims, rank, rng)
        program = random_goia_program(dims, int(rng.integers(1, max_depth + 1)), rng, basis)
        return monotonicity_check(rho, basis, program)

    results = _map(one, n, seed, threads)
    worst = min(r.decrease for r in results)
    threshold = -1e-9
    return SuiteResult("monotonicity", n, worst >= threshold, worst, threshold,
                       {"max_branches": max(r.branches for r in results),
                        "skipped_branches": sum(r.skipped for r in results)})


def additivity(n: int = 100, seed: int = 0, threads: int = 1) -> SuiteResult:
    def one(rng):
        dims = _random_dims(rng)
        rho = random_state(dims, int(rng.integers(1, dims[0] * dims[1] + 1)), rng)
        return additivity_check(rho, _random_basis(dims[0], rng), 2)

    results = _map(one, n, seed, threads)
    worst = max(results)
    threshold = 1e-9
    return SuiteResult("additivity", n, worst < threshold, worst, threshold)


def convexity(n: int = 100, seed: int = 0, threads: int = 1) -> SuiteResult:
    def one(rng):
        dims = _random_dims(rng)
        k = int(rng.integers(2, 5))
        states = [random_state(dims, int(rng.integers(1, dims[0] * dims[1] + 1)), rng)
                  for _ in range(k)]
        weights = rng.dirichlet(np.ones(k))
        return convexity_check(states, weights, _random_basis(dims[0], rng))

    results = _map(one, n, seed, threads)
    worst = min(results)
    threshold = -1e-9
    return SuiteResult("convexity", n, worst >= threshold, worst, threshold)


def free_set(n: int = 200, seed: int = 0, threads: int = 1, n_inputs: int = 20,
             max_depth: int = 6) -> SuiteResult:
    def one(rng):
        dims = _random_dims(rng)
        basis = _random_basis(dims[0], rng)
        program = random_goia_program(dims, int(rng.integers(1, max_depth + 1)), rng, basis)
        program.validate()
        worst = 0.0
        for _ in range(n_inputs):
            rho = random_cq_state(dims, basis, rng, full_rank=bool(rng.random() < 0.5))
            for branch in program.run(rho).branches:
                dist = np.linalg.norm(branch.state.mat - delta_Z(branch.state, basis).witness.mat)
                worst = max(worst, float(dist))
        return worst

    results = _map(one, n, seed, threads)
    worst = max(results)
    threshold = 1e-8
    return SuiteResult("free-set", n, worst <= threshold, worst, threshold,
                       {"inputs_per_program": n_inputs})


def pure_state(n: int = 50, seed: int = 0, threads: int = 1) -> SuiteResult:
    def one(rng):
        dims = ((2, 2), (2, 3), (3, 2), (3, 3))[int(rng.integers(4))]
        basis = _random_basis(dims[0], rng)
        psi = random_state(dims, 1, rng)
        w, v = np.linalg.eigh(psi.mat)
        vec = v[:, -1]
        rec = pure_state_recoverable(vec, dims, basis)
        direct = delta_Z(DensityMatrix.from_ket(vec, dims), basis).value
        return max(abs(rec.delta - direct), abs(rec.delta - rec.delta_after))

    results = _map(one, n, seed, threads)
    worst = max(results)
    threshold = 1e-9
    return SuiteResult("pure-state", n, worst <= threshold, worst, threshold)


def dqc1_se(n: int = 100, seed: int = 0, threads: int = 1, n_runs: int = 200_000,
            dim: int = 8) -> SuiteResult:
    """Coverage of the 4-SE interval and empirical-vs-analytic SE agreement."""
    u = haar_unitary(dim, seed)
    probe = ProbeSpec(p=0.5, a=1.0)
    sample_seeds = np.random.SeedSequence(seed).generate_state(n)

    def one(k):
        return dqc1_sample(probe, u, n_runs, int(sample_seeds[k]))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(one, range(n)))
    else:
        reports = [one(k) for k in range(n)]
    inside = sum(r.error <= 4 * r.analytic_se for r in reports)
    se_dev = max(abs(r.empirical_se / r.analytic_se - 1) for r in reports)
    coverage = inside / n
    # scatter of the repeated estimates, an SE check independent of the per-run formula
    est = np.array([r.estimate for r in reports])
    spread = float(np.sqrt(np.mean(np.abs(est - est.mean()) ** 2) * n / (n - 1))) if n > 1 else 0.0
    passed = coverage >= 0.99 and se_dev <= 0.10
    return SuiteResult("dqc1-se", n, passed, se_dev, 0.10,
                       {"coverage_4se": coverage, "n_runs": n_runs, "dim": dim,
                        "repetition_se_ratio": spread / reports[0].analytic_se})


SUITES = {
    "monotonicity": monotonicity,
    "additivity": additivity,
    "convexity": convexity,
    "free-set": free_set,
    "pure-state": pure_state,
    "dqc1-se": dqc1_se,
}


def run_suite(name: str, n: int | None = None, seed: int = 0, threads: int = 1) -> SuiteResult:
    fn = SUITES[name]
    kwargs = {"seed": seed, "threads": threads}
    if n is not None:
        kwargs["n"] = n
    return fn(**kwargs)
