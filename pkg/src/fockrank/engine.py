"""Matrix elements <bra| P(1 + u v) |ket> by Gaussian averaging of block factors.

The running product of the factors f_1 ... f_N is folded left to right in
block order and then Gaussian-averaged.  For fermions the fold is graded:
a factor's contribution from an odd bra component picks up the parity of
everything already accumulated,

    R <- R * (f - f_odd) + parity_flip(R) * f_odd,

which is the sign of moving that block's terms past the bra creation
strings of the later blocks.  When every bra factor has definite even
parity, or the running product stays even, this is the plain product.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .core import (
    MAX_RANK, Instance, LowRankOperator, ProductState, RankCapError, Statistics, block_slice, check_compatible,
    product_state, FactorState,
)
from .factors import FactorPolynomial, build_factor, build_factor_single_boson, build_factor_single_fermion
from .grassmann import GrassmannElement, berezin_gaussian_average, grassmann_multiply
from .poly import MAX_FACTORIAL_DEGREE, MAX_TABLE_ENTRIES, OpCounter, ResourceGuardError, gaussian_average, \
    poly_multiply, poly_one, ranking, table_size


@dataclass(frozen=True)
class ComputationReport:
    value: complex
    op_count: int
    build_op_count: int
    peak_coefficient_count: int
    wall_time: float
    N: int
    k: int
    statistics: Statistics
    D: int

    def as_dict(self) -> dict:
        return {
            "value": [self.value.real, self.value.imag],
            "op_count": self.op_count,
            "build_op_count": self.build_op_count,
            "peak_coefficient_count": self.peak_coefficient_count,
            "wall_time": self.wall_time,
            "N": self.N,
            "k": self.k,
            "statistics": self.statistics.value,
            "D": self.D,
        }


def degree_cap(bra: ProductState, ket: ProductState) -> int:
    return max(bra.D, ket.D)


def check_resources(statistics: Statistics, k: int, D: int, average: bool = True) -> None:
    """Raise :class:`ResourceGuardError` if the bosonic running product cannot fit.

    With ``average=False`` only the table size is checked; the factorial
    weights of the Gaussian average are not needed.
    """
    if k > MAX_RANK:
        raise RankCapError(f"rank {k} exceeds the cap {MAX_RANK}", field="k")
    if statistics is Statistics.BOSON:
        if average and D > MAX_FACTORIAL_DEGREE:
            raise ResourceGuardError(f"degree cap {D} exceeds {MAX_FACTORIAL_DEGREE}")
        size = table_size(k, D) ** 2
        if size > MAX_TABLE_ENTRIES:
            raise ResourceGuardError(f"N-fold product table needs {size} entries (k={k}, D={D})")


def fold_factors(factors, k: int, statistics: Statistics, D: int, counter: OpCounter | None = None,
                 average: bool = True):
    """Multiply factors in the given order; returns (value, peak coefficient count).

    ``average=False`` skips the final Gaussian average and returns NaN as the
    value (operation counting only).
    """
    counter = OpCounter() if counter is None else counter
    if statistics is Statistics.BOSON:
        ranking(k).grow(D)
        acc = poly_one(k, D)
        peak = acc.coeffs.size
        for f in factors:
            acc = poly_multiply(acc, f.poly, cap=D, counter=counter)
            peak = max(peak, acc.coeffs.size)
        return (gaussian_average(acc) if average else complex("nan")), peak

    acc = GrassmannElement.one(k)
    for f in factors:
        odd = f.odd_bra
        if odd is None or odd.is_zero:
            acc = grassmann_multiply(acc, f.grassmann, counter)
            continue
        even = f.grassmann - odd
        nxt = grassmann_multiply(acc.parity_flip(), odd, counter)
        if not even.is_zero:
            nxt = nxt + grassmann_multiply(acc, even, counter)
        acc = nxt
    return (berezin_gaussian_average(acc) if average else complex("nan")), acc.coeffs.size


def expectation(bra: ProductState, ket: ProductState | None, op: LowRankOperator) -> ComputationReport:
    """<bra| P(1 + A) |ket> with A = op.u @ op.v (``ket=None`` means ket = bra)."""
    ket = bra if ket is None else ket
    check_compatible(bra, ket, op)
    stats = ket.statistics
    D = degree_cap(bra, ket)
    check_resources(stats, op.k, D)
    t0 = time.perf_counter()
    build = OpCounter()
    slices = block_slice(op, ket)
    factors = [build_factor(b, *slices[mu], ket=kf, block=mu, counter=build)
               for mu, (b, kf) in enumerate(zip(bra.factors, ket.factors))]
    counter = OpCounter()
    value, peak = fold_factors(factors, op.k, stats, D, counter)
    return ComputationReport(value, counter.count, build.count, peak, time.perf_counter() - t0,
                             ket.N, op.k, stats, D)


def compute(instance: Instance) -> ComputationReport:
    return expectation(instance.bra, instance.ket, instance.op)


def _single_particle_report(u, v, statistics: Statistics, average: bool = True) -> ComputationReport:
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    N, k = u.shape
    if v.shape != (k, N):
        raise ValueError(f"u has shape {u.shape} but v has shape {v.shape}")
    check_resources(statistics, k, N, average)
    t0 = time.perf_counter()
    build = build_factor_single_boson if statistics is Statistics.BOSON else build_factor_single_fermion
    factors = (build(u[mu], v[:, mu], block=mu) for mu in range(N))
    counter = OpCounter()
    value, peak = fold_factors(factors, k, statistics, N, counter, average)
    return ComputationReport(value, counter.count, 0, peak, time.perf_counter() - t0, N, k, statistics, N)


def permanent_rank_shifted(u, v, average: bool = True) -> ComputationReport:
    """Per(1 + u v) for u of shape (N, k) and v of shape (k, N)."""
    return _single_particle_report(u, v, Statistics.BOSON, average)


def determinant_rank_shifted(u, v, average: bool = True) -> ComputationReport:
    """det(1 + u v) through the fermionic engine with one fermion per mode."""
    return _single_particle_report(u, v, Statistics.FERMION, average)


def determinant_fast(u, v) -> complex:
    """det(1 + u v) as the k x k determinant det(1 + v u)."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    return complex(np.linalg.det(np.eye(v.shape[0]) + v @ u))


def is_single_particle_family(state: ProductState) -> bool:
    """True when every factor is a^dagger |vac> on one mode."""
    return all(f.d == 1 and dict(f.terms) == {(1,): 1.0} for f in state.factors)


def single_particle_state(N: int, statistics: Statistics) -> ProductState:
    return product_state(FactorState.single_particle(statistics) for _ in range(N))


__all__ = [
    "ComputationReport", "expectation", "compute", "permanent_rank_shifted", "determinant_rank_shifted",
    "determinant_fast", "fold_factors", "degree_cap", "check_resources", "is_single_particle_family",
    "single_particle_state", "FactorPolynomial",
]
