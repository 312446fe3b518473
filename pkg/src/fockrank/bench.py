"""Seeded instance generation and operation-count scaling benchmarks."""
from __future__ import annotations

import csv
import os
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats as sps

from .core import (
    MAX_RANK, FactorState, InstanceError, LowRankOperator, PauliViolationError, RankCapError, Statistics,
    make_instance, occupations, product_state, Instance,
)
from .engine import determinant_rank_shifted, permanent_rank_shifted
from .poly import MAX_FACTORIAL_DEGREE, ResourceGuardError

CSV_HEADER = ["n", "k", "d", "stat", "deg_cap", "op_count", "wall_s", "re", "im", "seed"]
MAX_BOSON_BENCH_K = 2
MAX_BOSON_BENCH_N = 256
MAX_FERMION_BENCH_N = 10 ** 6


class GenerationError(InstanceError):
    pass


def _complex_uniform(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.uniform(-1, 1, shape) + 1j * rng.uniform(-1, 1, shape)


def random_factor(rng: np.random.Generator, d: int, n_max: int, statistics: Statistics,
                  single_particle: bool = False, max_terms: int = 4) -> FactorState:
    """Random normalized factor state with at most ``n_max`` particles."""
    if single_particle:
        if d == 1:
            return FactorState.single_particle(statistics)
        amps = rng.normal(size=d) + 1j * rng.normal(size=d)
        amps /= np.linalg.norm(amps)
        return FactorState(d, {tuple(int(i == j) for i in range(d)): a for j, a in enumerate(amps)}, statistics)
    occs = occupations(d, n_max, statistics)
    count = int(rng.integers(1, min(max_terms, len(occs)) + 1))
    picks = rng.choice(len(occs), size=count, replace=False)
    amps = rng.normal(size=count) + 1j * rng.normal(size=count)
    amps /= np.linalg.norm(amps)
    return FactorState(d, {occs[int(i)]: a for i, a in zip(picks, amps)}, statistics)


def generate_instance(seed: int, N: int, d: int, k: int, statistics, n_max: int = 1,
                      single_particle: bool = False, distinct_ket: bool = False) -> Instance:
    """Deterministic random instance; the same arguments give the same instance."""
    statistics = Statistics(statistics) if not isinstance(statistics, Statistics) else statistics
    if N < 1 or d < 1:
        raise GenerationError(f"N and d must be positive (got N={N}, d={d})", field="N" if N < 1 else "d")
    if not 1 <= k <= MAX_RANK:
        raise RankCapError(f"k must lie in [1, {MAX_RANK}], got {k}", field="k")
    if n_max < 0:
        raise GenerationError(f"n_max must be nonnegative, got {n_max}", field="n_max")
    if single_particle:
        n_max = 1
    if statistics is Statistics.FERMION and n_max > d:
        raise PauliViolationError(f"{n_max} fermions do not fit in {d} modes", field="n_max")
    rng = np.random.default_rng(seed)
    M = N * d
    u = _complex_uniform(rng, (M, k))
    v = _complex_uniform(rng, (k, M))
    bra = product_state(random_factor(rng, d, n_max, statistics, single_particle) for _ in range(N))
    ket = None
    if distinct_ket:
        ket = product_state(random_factor(rng, d, n_max, statistics, single_particle) for _ in range(N))
    return make_instance(bra, LowRankOperator(u, v), ket)


@dataclass(frozen=True)
class BenchRecord:
    n: int
    k: int
    d: int
    stat: str
    deg_cap: int
    op_count: int
    wall_s: float
    re: float
    im: float
    seed: int


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r_squared: float


def fit_slope(ns, op_counts, min_points: int = 4) -> SlopeFit:
    """Least-squares fit of log(op_count) against log(N)."""
    ns = np.asarray(ns, dtype=float)
    ops = np.asarray(op_counts, dtype=float)
    if len(set(ns.tolist())) < min_points:
        raise ValueError(f"slope fit needs at least {min_points} distinct N values")
    res = sps.linregress(np.log(ns), np.log(ops))
    return SlopeFit(float(res.slope), float(res.intercept), float(res.rvalue ** 2))


def check_bench_guard(k: int, statistics: Statistics, ns) -> None:
    top = max(ns)
    if statistics is Statistics.BOSON:
        if k > MAX_BOSON_BENCH_K or top > MAX_BOSON_BENCH_N:
            raise ResourceGuardError(
                f"bosonic benchmark refused at (N={top}, k={k}): limits are k <= {MAX_BOSON_BENCH_K}, "
                f"N <= {MAX_BOSON_BENCH_N}")
    elif k > MAX_RANK or top > MAX_FERMION_BENCH_N:
        raise ResourceGuardError(
            f"fermionic benchmark refused at (N={top}, k={k}): limits are k <= {MAX_RANK}, N <= {MAX_FERMION_BENCH_N}")


def bench_one(N: int, k: int, statistics: Statistics, seed: int) -> BenchRecord:
    """One run on the single-particle family (d = 1, one particle per block)."""
    rng = np.random.default_rng([seed, N, k])
    u = _complex_uniform(rng, (N, k))
    v = _complex_uniform(rng, (k, N))
    if statistics is Statistics.BOSON:
        # Factorial weights overflow past 170; only the operation count is meaningful there.
        rep = permanent_rank_shifted(u, v, average=N <= MAX_FACTORIAL_DEGREE)
    else:
        rep = determinant_rank_shifted(u, v)
    return BenchRecord(N, k, 1, statistics.value, rep.D, rep.op_count, rep.wall_time,
                       rep.value.real, rep.value.imag, seed)


def bench_scaling(k: int, statistics, ns, seed: int = 0, min_points: int = 4):
    """Run the sweep in ascending N; returns (records, SlopeFit)."""
    statistics = Statistics(statistics) if not isinstance(statistics, Statistics) else statistics
    ns = sorted({int(n) for n in ns})
    check_bench_guard(k, statistics, ns)
    records = [bench_one(n, k, statistics, seed) for n in ns]
    return records, fit_slope([r.n for r in records], [r.op_count for r in records], min_points)


def target_slope(k: int, statistics) -> float:
    return 2 * k + 1 if Statistics(statistics) is Statistics.BOSON else 1.0


def write_csv(records, path, append: bool = False) -> None:
    """Write records; in append mode the header is written only to an empty file."""
    mode = "a" if append else "w"
    need_header = not append or not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, mode, newline="") as fh:
        w = csv.writer(fh)
        if need_header:
            w.writerow(CSV_HEADER)
        for r in sorted(records, key=lambda r: r.n):
            row = asdict(r)
            w.writerow([row[h] for h in CSV_HEADER])


def read_csv(path) -> list[BenchRecord]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    types = {"n": int, "k": int, "d": int, "stat": str, "deg_cap": int, "op_count": int,
             "wall_s": float, "re": float, "im": float, "seed": int}
    return [BenchRecord(**{h: types[h](row[h]) for h in CSV_HEADER}) for row in rows]
