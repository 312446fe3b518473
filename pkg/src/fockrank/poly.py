"""Polynomials in commuting variables z_1..z_k and z*_1..z*_k.

A :class:`BidegreePoly` stores a dense coefficient table ``coeffs[i, j]``
where ``i`` ranks the exponent vector ``m`` of the z-group and ``j`` ranks
the exponent vector ``n`` of the z*-group.  Exponent vectors are ranked in
graded lexicographic order (total degree first), so every vector of total
degree <= d occupies a prefix of length ``C(d + k, k)``.  A table therefore
only needs to be as large as its current degree bounds, and the running
product of the expectation engine grows in place of a fixed preallocation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Iterator, Mapping

import numba
import numpy as np

MAX_FACTORIAL_DEGREE = 170
# 2**25 complex128 entries is 512 MiB per table.
MAX_TABLE_ENTRIES = 2 ** 25


class CapOverflowError(ArithmeticError):
    """A product would exceed the degree cap of its destination table."""


class ResourceGuardError(MemoryError):
    """A dense table would exceed :data:`MAX_TABLE_ENTRIES`."""


class OpCounter:
    """Accumulates elementary operations (complex multiply-adds)."""

    __slots__ = ("count",)

    def __init__(self, count: int = 0):
        self.count = int(count)

    def add(self, n: int) -> None:
        self.count += int(n)

    def merge(self, other: "OpCounter") -> "OpCounter":
        return OpCounter(self.count + other.count)

    def __repr__(self):
        return f"OpCounter({self.count})"


def table_size(k: int, deg: int) -> int:
    """Number of exponent vectors of length k with total degree <= deg."""
    if deg < 0:
        return 0
    return math.comb(deg + k, k)


class _Ranking:
    """Graded-lex enumeration of exponent vectors for a fixed k, grown on demand."""

    def __init__(self, k: int):
        self.k = k
        self.deg = -1
        self.vectors = np.zeros((0, k), dtype=np.int64)
        self.index = np.full((1,) * k, -1, dtype=np.int64)

    def grow(self, deg: int) -> None:
        if deg <= self.deg:
            return
        rows = [self.vectors]
        for d in range(self.deg + 1, deg + 1):
            shell = set()
            for combo in combinations_with_replacement(range(self.k), d):
                m = [0] * self.k
                for a in combo:
                    m[a] += 1
                shell.add(tuple(m))
            rows.append(np.array(sorted(shell, reverse=True), dtype=np.int64).reshape(-1, self.k))
        self.vectors = np.concatenate(rows)
        self.index = np.full((deg + 1,) * self.k, -1, dtype=np.int64)
        self.index[tuple(self.vectors.T)] = np.arange(len(self.vectors))
        self.deg = deg

    def rank(self, m) -> int:
        m = tuple(int(x) for x in m)
        self.grow(sum(m))
        return int(self.index[m])

    def shift(self, mono, size: int) -> np.ndarray:
        """Ranks of ``vectors[:size] + mono``."""
        top = int(self.vectors[size - 1].sum()) if size else 0
        self.grow(top + int(sum(mono)))
        targets = self.vectors[:size] + np.asarray(mono, dtype=np.int64)
        return self.index[tuple(targets.T)]

    def factorial_weights(self, size: int) -> np.ndarray:
        return np.prod(_FACTORIALS[self.vectors[:size]], axis=1)


_FACTORIALS = np.array([float(math.factorial(i)) for i in range(MAX_FACTORIAL_DEGREE + 1)])


@lru_cache(maxsize=None)
def ranking(k: int) -> _Ranking:
    return _Ranking(k)


@numba.njit(cache=True)
def _convolve(src, out, rows, cols, coefs):
    # out[rows[t, i], cols[t, j]] += coefs[t] * src[i, j], fixed loop order.
    n_terms = coefs.shape[0]
    si, sj = src.shape
    for t in range(n_terms):
        c = coefs[t]
        for i in range(si):
            ri = rows[t, i]
            for j in range(sj):
                out[ri, cols[t, j]] += c * src[i, j]
    return n_terms * si * sj


@dataclass(frozen=True, eq=False)
class BidegreePoly:
    """Dense polynomial with degree bounds ``deg_m`` (z-group) and ``deg_n`` (z*-group).

    ``cap`` is the largest total degree per group the polynomial may ever
    reach; products exceeding it raise :class:`CapOverflowError`.
    """

    k: int
    cap: int
    deg_m: int
    deg_n: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        if not 0 <= self.deg_m <= self.cap or not 0 <= self.deg_n <= self.cap:
            raise CapOverflowError(f"degrees ({self.deg_m}, {self.deg_n}) exceed cap {self.cap}")
        shape = (table_size(self.k, self.deg_m), table_size(self.k, self.deg_n))
        if self.coeffs.shape != shape:
            raise ValueError(f"coefficient table has shape {self.coeffs.shape}, expected {shape}")

    @classmethod
    def zeros(cls, k: int, cap: int, deg_m: int = 0, deg_n: int = 0) -> "BidegreePoly":
        rows, cols = table_size(k, deg_m), table_size(k, deg_n)
        if rows * cols > MAX_TABLE_ENTRIES:
            raise ResourceGuardError(f"a {rows} x {cols} coefficient table exceeds {MAX_TABLE_ENTRIES} entries")
        ranking(k).grow(max(deg_m, deg_n))
        return cls(k, cap, deg_m, deg_n, np.zeros((rows, cols), dtype=complex))

    @classmethod
    def from_terms(cls, k: int, terms: Mapping, cap: int | None = None) -> "BidegreePoly":
        """Build from ``{(m, n): coefficient}`` with m, n exponent tuples of length k."""
        clean = {(tuple(m), tuple(n)): complex(c) for (m, n), c in terms.items()}
        for m, n in clean:
            if len(m) != k or len(n) != k or min(m + n, default=0) < 0:
                raise ValueError(f"bad exponent pair {(m, n)} for k={k}")
        deg_m = max((sum(m) for (m, n), c in clean.items() if c != 0), default=0)
        deg_n = max((sum(n) for (m, n), c in clean.items() if c != 0), default=0)
        cap = max(deg_m, deg_n) if cap is None else cap
        p = cls.zeros(k, cap, deg_m, deg_n)
        r = ranking(k)
        for (m, n), c in clean.items():
            if c != 0:
                p.coeffs[r.rank(m), r.rank(n)] += c
        return p

    @property
    def shape(self):
        return self.coeffs.shape

    def coefficient(self, m, n) -> complex:
        if sum(m) > self.deg_m or sum(n) > self.deg_n:
            return 0j
        r = ranking(self.k)
        return complex(self.coeffs[r.rank(m), r.rank(n)])

    def terms(self) -> Iterator[tuple[tuple[int, ...], tuple[int, ...], complex]]:
        """Nonzero terms as ``(m, n, coefficient)``."""
        vecs = ranking(self.k).vectors
        for i, j in zip(*np.nonzero(self.coeffs)):
            yield tuple(vecs[i].tolist()), tuple(vecs[j].tolist()), complex(self.coeffs[i, j])

    def as_dict(self) -> dict:
        return {(m, n): c for m, n, c in self.terms()}

    def with_cap(self, cap: int) -> "BidegreePoly":
        return BidegreePoly(self.k, cap, self.deg_m, self.deg_n, self.coeffs)

    def adjoint(self) -> "BidegreePoly":
        """Swap the two variable groups and conjugate the coefficients."""
        return BidegreePoly(self.k, self.cap, self.deg_n, self.deg_m, self.coeffs.T.conj().copy())

    def _padded(self, deg_m, deg_n) -> np.ndarray:
        out = np.zeros((table_size(self.k, deg_m), table_size(self.k, deg_n)), dtype=complex)
        out[: self.shape[0], : self.shape[1]] = self.coeffs
        return out

    def __add__(self, other: "BidegreePoly") -> "BidegreePoly":
        if not isinstance(other, BidegreePoly) or other.k != self.k:
            return NotImplemented
        dm, dn = max(self.deg_m, other.deg_m), max(self.deg_n, other.deg_n)
        return BidegreePoly(self.k, max(self.cap, other.cap), dm, dn,
                            self._padded(dm, dn) + other._padded(dm, dn))

    def __mul__(self, other):
        if isinstance(other, BidegreePoly):
            return poly_multiply(self, other)
        if isinstance(other, (int, float, complex, np.number)):
            return BidegreePoly(self.k, self.cap, self.deg_m, self.deg_n, self.coeffs * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self * other
        return NotImplemented


def poly_one(k: int, cap: int = 0) -> BidegreePoly:
    p = BidegreePoly.zeros(k, cap)
    p.coeffs[0, 0] = 1.0
    return p


def poly_multiply(p: BidegreePoly, q: BidegreePoly, cap: int | None = None,
                  counter: OpCounter | None = None) -> BidegreePoly:
    """Product ``p * q``.

    ``p`` is swept as a dense table over its degree bounds and ``q`` over its
    nonzero terms; every sweep step is one complex multiply-add and is added
    to ``counter``.  The destination cap defaults to the larger operand cap.
    """
    if p.k != q.k:
        raise ValueError(f"variable counts differ: {p.k} vs {q.k}")
    cap = max(p.cap, q.cap) if cap is None else cap
    deg_m, deg_n = p.deg_m + q.deg_m, p.deg_n + q.deg_n
    if deg_m > cap or deg_n > cap:
        raise CapOverflowError(f"product degrees ({deg_m}, {deg_n}) exceed cap {cap}")
    out = BidegreePoly.zeros(p.k, cap, deg_m, deg_n)
    qi, qj = np.nonzero(q.coeffs)
    r = ranking(p.k)
    si, sj = p.shape
    rows = np.empty((len(qi), si), dtype=np.int64)
    cols = np.empty((len(qi), sj), dtype=np.int64)
    for t, (i, j) in enumerate(zip(qi, qj)):
        rows[t] = r.shift(r.vectors[i], si)
        cols[t] = r.shift(r.vectors[j], sj)
    ops = _convolve(np.ascontiguousarray(p.coeffs), out.coeffs, rows, cols,
                    np.ascontiguousarray(q.coeffs[qi, qj]))
    if counter is not None:
        counter.add(ops)
    return out


def gaussian_average(p: BidegreePoly) -> complex:
    """Sum of diagonal coefficients ``c(m, m)`` weighted by ``prod_a m_a!``."""
    d = min(p.deg_m, p.deg_n)
    if d > MAX_FACTORIAL_DEGREE:
        raise OverflowError(f"degree {d} exceeds {MAX_FACTORIAL_DEGREE}; factorial weights overflow")
    size = table_size(p.k, d)
    w = ranking(p.k).factorial_weights(size)
    return complex(np.dot(np.diagonal(p.coeffs)[:size], w))
