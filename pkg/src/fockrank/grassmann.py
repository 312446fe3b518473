"""Grassmann algebra on the 2k generators z_1, z*_1, ..., z_k, z*_k.

Generators are interleaved: bit ``2a`` of a mask marks ``z_{a+1}`` and bit
``2a + 1`` marks ``z*_{a+1}``.  A mask stands for the monomial with its
generators written in ascending bit order.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numba
import numpy as np

from .poly import OpCounter


@numba.njit(cache=True, inline="always")
def _popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@numba.njit(cache=True)
def _reorder_sign(a, b):
    # (-1)^(# pairs (i in a, j in b) with i > j)
    s = 0
    while b:
        low = b & -b
        s += _popcount(a & ~((low << 1) - 1))
        b ^= low
    return 1 - 2 * (s & 1)


def reorder_sign(a: int, b: int) -> int:
    """Sign picked up when the monomial ``a`` times ``b`` is sorted into canonical order."""
    return int(_reorder_sign(np.int64(a), np.int64(b)))


@numba.njit(cache=True)
def _gmul(p, q, out):
    # Left operand swept densely, right operand over its nonzero masks.
    size = p.shape[0]
    ops = 0
    for b in range(size):
        qb = q[b]
        if qb == 0:
            continue
        for a in range(size):
            if a & b:
                continue
            out[a | b] += _reorder_sign(a, b) * p[a] * qb
            ops += 1
    return ops


def _mask(k: int, gens: Iterable[tuple[int, bool]]) -> tuple[int, int]:
    """Mask and sign for a product of generators given as (alpha, starred) in the written order."""
    mask, sign = 0, 1
    for alpha, starred in gens:
        if not 0 <= alpha < k:
            raise ValueError(f"generator index {alpha} out of range for k={k}")
        bit = 1 << (2 * alpha + int(starred))
        if mask & bit:
            return 0, 0
        sign *= reorder_sign(mask, bit)
        mask |= bit
    return mask, sign


@dataclass(frozen=True, eq=False)
class GrassmannElement:
    k: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.coeffs.shape != (4 ** self.k,):
            raise ValueError(f"expected {4 ** self.k} coefficients, got {self.coeffs.shape}")

    @classmethod
    def zeros(cls, k: int) -> "GrassmannElement":
        return cls(k, np.zeros(4 ** k, dtype=complex))

    @classmethod
    def one(cls, k: int) -> "GrassmannElement":
        e = cls.zeros(k)
        e.coeffs[0] = 1.0
        return e

    @classmethod
    def monomial(cls, k: int, *gens: tuple[int, bool], coeff: complex = 1.0) -> "GrassmannElement":
        """``coeff`` times the generators multiplied in the order given.

        Generators are ``(alpha, starred)`` with zero-based ``alpha``; e.g.
        ``monomial(2, (1, False), (0, False))`` is z_2 z_1 = -z_1 z_2.
        """
        e = cls.zeros(k)
        mask, sign = _mask(k, gens)
        if sign:
            e.coeffs[mask] = sign * coeff
        return e

    @property
    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def parity_flip(self) -> "GrassmannElement":
        """Grade involution: negate every odd monomial."""
        return GrassmannElement(self.k, self.coeffs * _parity_signs(self.k))

    def even_part(self) -> "GrassmannElement":
        return GrassmannElement(self.k, np.where(_parity_signs(self.k) > 0, self.coeffs, 0))

    def odd_part(self) -> "GrassmannElement":
        return GrassmannElement(self.k, np.where(_parity_signs(self.k) < 0, self.coeffs, 0))

    def degree_parts(self) -> set[int]:
        return {bin(int(m)).count("1") for m in np.nonzero(self.coeffs)[0]}

    def __add__(self, other):
        if not isinstance(other, GrassmannElement) or other.k != self.k:
            return NotImplemented
        return GrassmannElement(self.k, self.coeffs + other.coeffs)

    def __sub__(self, other):
        return self + (-1) * other

    def __mul__(self, other):
        if isinstance(other, GrassmannElement):
            return grassmann_multiply(self, other)
        if isinstance(other, (int, float, complex, np.number)):
            return GrassmannElement(self.k, self.coeffs * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self * other
        return NotImplemented


@lru_cache(maxsize=None)
def _parity_signs(k: int) -> np.ndarray:
    masks = np.arange(4 ** k)
    pc = np.array([bin(m).count("1") for m in masks])
    return 1 - 2 * (pc & 1)


def grassmann_multiply(p: GrassmannElement, q: GrassmannElement,
                       counter: OpCounter | None = None) -> GrassmannElement:
    if p.k != q.k:
        raise ValueError(f"generator counts differ: {p.k} vs {q.k}")
    out = GrassmannElement.zeros(p.k)
    ops = _gmul(np.ascontiguousarray(p.coeffs), np.ascontiguousarray(q.coeffs), out.coeffs)
    if counter is not None:
        counter.add(ops)
    return out


@lru_cache(maxsize=None)
def paired_masks(k: int) -> np.ndarray:
    """Masks built from complete pairs {z_a, z*_a}."""
    return np.array([sum(3 << (2 * a) for a in range(k) if (s >> a) & 1) for s in range(2 ** k)], dtype=np.int64)


def berezin_gaussian_average(p: GrassmannElement) -> complex:
    """Gaussian average with S(1) = 1 and S(z_a z*_a) = 1, factorized over pairs.

    In the interleaved order every complete-pair monomial has weight +1 and
    monomials with an unpaired generator integrate to zero.
    """
    return complex(p.coeffs[paired_masks(p.k)].sum())
