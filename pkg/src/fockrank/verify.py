"""Named verification suites comparing the engine against independent routes.

Each suite returns a :class:`SuiteResult`; a case passes when its largest
relative error is within ``RTOL`` (absolute floor ``ATOL``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bench import generate_instance, random_factor
from .core import LowRankOperator, Statistics, make_instance, product_state
from .engine import compute, determinant_fast, determinant_rank_shifted, expectation, permanent_rank_shifted
from .grassmann import GrassmannElement, berezin_gaussian_average
from .oracles import brute_force_expectation, dense_determinant, normal_ordered_expansion_check, ryser_permanent
from .poly import BidegreePoly, gaussian_average

RTOL = 1e-9
ATOL = 1e-12
SUITES = ("moments", "oracle-small", "permanent", "determinant", "normal-ordered", "conjugation")


def rel_err(value, reference) -> float:
    return abs(value - reference) / max(abs(reference), ATOL)


@dataclass
class CaseResult:
    label: str
    max_rel_err: float
    tol: float
    failing_seeds: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failing_seeds and self.max_rel_err <= self.tol


@dataclass
class SuiteResult:
    name: str
    cases: list[CaseResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def lines(self) -> list[str]:
        out = []
        for c in self.cases:
            status = "PASS" if c.passed else "FAIL"
            line = f"{status}  {self.name}/{c.label}: max rel err {c.max_rel_err:.3e} (tol {c.tol:.0e})"
            if c.failing_seeds:
                line += f"  failing seeds: {c.failing_seeds}"
            out.append(line)
        return out


class _Case:
    def __init__(self, label, tol=RTOL):
        self.label, self.tol, self.worst, self.failing = label, tol, 0.0, []

    def record(self, seed, err):
        self.worst = max(self.worst, err)
        if not err <= self.tol:
            self.failing.append(seed)

    def result(self):
        return CaseResult(self.label, self.worst, self.tol, self.failing)


def _rng_uv(rng, M, k):
    u = rng.uniform(-1, 1, (M, k)) + 1j * rng.uniform(-1, 1, (M, k))
    v = rng.uniform(-1, 1, (k, M)) + 1j * rng.uniform(-1, 1, (k, M))
    return u, v


def suite_moments(seeds: int = 0, base_seed: int = 0) -> SuiteResult:
    table = _Case("bosonic z^m z*^n, m,n <= 6", tol=0.0)
    for m in range(7):
        for n in range(7):
            p = BidegreePoly.from_terms(1, {((m,), (n,)): 1.0})
            expected = math.factorial(m) if m == n else 0
            table.record((m, n), abs(gaussian_average(p) - expected))
    two = _Case("bosonic k=2 product moments", tol=0.0)
    for m1 in range(4):
        for m2 in range(4):
            p = BidegreePoly.from_terms(2, {((m1, m2), (m1, m2)): 1.0})
            two.record((m1, m2), abs(gaussian_average(p) - math.factorial(m1) * math.factorial(m2)))
    berezin = _Case("Berezin S(1), S(z z*), S(z), S(z*)", tol=0.0)
    checks = [
        (GrassmannElement.one(1), 1),
        (GrassmannElement.monomial(1, (0, False), (0, True)), 1),
        (GrassmannElement.monomial(1, (0, False)), 0),
        (GrassmannElement.monomial(1, (0, True)), 0),
        (GrassmannElement.monomial(2, (0, False), (0, True), (1, False), (1, True)), 1),
    ]
    for i, (e, expected) in enumerate(checks):
        berezin.record(i, abs(berezin_gaussian_average(e) - expected))
    return SuiteResult("moments", [table.result(), two.result(), berezin.result()])


def random_small_instance(seed: int, statistics: Statistics):
    """N <= 4, d <= 2, at most 2 particles per factor, k <= 2; half with distinct bra and ket."""
    rng = np.random.default_rng([seed, 0 if statistics is Statistics.BOSON else 1])
    N = int(rng.integers(1, 5))
    k = int(rng.integers(1, 3))
    dims = [int(rng.integers(1, 3)) for _ in range(N)]
    bra = product_state(random_factor(rng, d, min(2, d) if statistics is Statistics.FERMION else 2, statistics)
                        for d in dims)
    ket = bra
    if rng.random() < 0.5:
        ket = product_state(random_factor(rng, d, min(2, d) if statistics is Statistics.FERMION else 2, statistics)
                            for d in dims)
    u, v = _rng_uv(rng, sum(dims), k)
    return make_instance(bra, LowRankOperator(u, v), ket)


def suite_oracle_small(seeds: int = 100, base_seed: int = 0) -> SuiteResult:
    cases = []
    for stats in Statistics:
        case = _Case(f"{stats.value} engine vs brute force")
        for s in range(base_seed, base_seed + seeds):
            inst = random_small_instance(s, stats)
            ref = brute_force_expectation(inst.bra, inst.ket, inst.op.dense())
            case.record(s, rel_err(compute(inst).value, ref))
        cases.append(case.result())
    return SuiteResult("oracle-small", cases)


def suite_permanent(seeds: int = 50, base_seed: int = 0) -> SuiteResult:
    case = _Case("engine vs Ryser, N <= 12, k <= 3", tol=1e-10)
    for s in range(base_seed, base_seed + seeds):
        rng = np.random.default_rng([s, 2])
        N, k = int(rng.integers(1, 13)), int(rng.integers(1, 4))
        u, v = _rng_uv(rng, N, k)
        case.record(s, rel_err(permanent_rank_shifted(u, v).value, ryser_permanent(np.eye(N) + u @ v)))
    return SuiteResult("permanent", [case.result()])


def suite_determinant(seeds: int = 50, base_seed: int = 0) -> SuiteResult:
    engine = _Case("fermionic engine vs det(1+uv)", tol=1e-10)
    sylvester = _Case("det(1+vu) vs det(1+uv)", tol=1e-10)
    for s in range(base_seed, base_seed + seeds):
        rng = np.random.default_rng([s, 3])
        N, k = int(rng.integers(1, 13)), int(rng.integers(1, 4))
        u, v = _rng_uv(rng, N, k)
        ref = dense_determinant(np.eye(N) + u @ v)
        engine.record(s, rel_err(determinant_rank_shifted(u, v).value, ref))
        sylvester.record(s, rel_err(determinant_fast(u, v), ref))
    return SuiteResult("determinant", [engine.result(), sylvester.result()])


def suite_normal_ordered(seeds: int = 20, base_seed: int = 0) -> SuiteResult:
    cases = []
    for stats in Statistics:
        case = _Case(f"{stats.value} 2-mode residual", tol=1e-12)
        for s in range(base_seed, base_seed + seeds):
            rng = np.random.default_rng([s, 4])
            A = rng.uniform(-1, 1, (2, 2)) + 1j * rng.uniform(-1, 1, (2, 2))
            case.record(s, normal_ordered_expansion_check(A, 3, stats))
        cases.append(case.result())
    return SuiteResult("normal-ordered", cases)


def suite_conjugation(seeds: int = 50, base_seed: int = 0) -> SuiteResult:
    cases = []
    for stats in Statistics:
        case = _Case(f"{stats.value} <P(1+A)> = conj <P(1+A^dagger)>")
        for s in range(base_seed, base_seed + seeds):
            rng = np.random.default_rng([s, 5])
            N, d = int(rng.integers(1, 5)), int(rng.integers(1, 3))
            inst = generate_instance(int(rng.integers(2 ** 31)), N, d, int(rng.integers(1, 3)), stats,
                                     n_max=min(2, d) if stats is Statistics.FERMION else 2)
            a = expectation(inst.bra, None, inst.op).value
            b = expectation(inst.bra, None, inst.op.adjoint()).value
            case.record(s, rel_err(a, b.conjugate()))
        cases.append(case.result())
    return SuiteResult("conjugation", cases)


_RUNNERS = {
    "moments": (suite_moments, 0),
    "oracle-small": (suite_oracle_small, 100),
    "permanent": (suite_permanent, 50),
    "determinant": (suite_determinant, 50),
    "normal-ordered": (suite_normal_ordered, 20),
    "conjugation": (suite_conjugation, 50),
}


def run_suite(name: str, seeds: int | None = None, base_seed: int = 0) -> SuiteResult:
    if name not in _RUNNERS:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    fn, default = _RUNNERS[name]
    return fn(default if seeds is None else seeds, base_seed)
