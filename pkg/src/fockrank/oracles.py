"""Brute-force reference computations on a truncated Fock space.

Nothing here touches the polynomial or Grassmann machinery; everything is
built from explicit creation/annihilation matrices so that the engine can
be checked against an independent route.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product

import numpy as np
import scipy.sparse as sp

from .core import ProductState, Statistics

MAX_PERMANENT_SIZE = 20
MAX_ORACLE_MODES = 8
MAX_ORACLE_PARTICLES = 8


class OracleSizeError(ValueError):
    """Instance exceeds the hard size caps of a brute-force oracle."""


def ryser_permanent(a) -> complex:
    """Permanent by Ryser's inclusion-exclusion formula with Gray-code row sums."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    if n > MAX_PERMANENT_SIZE:
        raise OracleSizeError(f"size {n} exceeds {MAX_PERMANENT_SIZE}")
    if n == 0:
        return 1.0 + 0j
    row_sums = np.zeros(n, dtype=complex)
    total = 0j
    in_set = np.zeros(n, dtype=bool)
    for step in range(1, 2 ** n):
        j = (step & -step).bit_length() - 1
        if in_set[j]:
            row_sums -= a[:, j]
        else:
            row_sums += a[:, j]
        in_set[j] = not in_set[j]
        size = int(in_set.sum())
        total += (-1) ** size * np.prod(row_sums)
    return complex((-1) ** n * total)


def dense_determinant(a) -> complex:
    """Determinant by LU factorization with partial pivoting."""
    lu = np.array(a, dtype=complex)
    n = lu.shape[0]
    if lu.shape != (n, n):
        raise ValueError("matrix must be square")
    det = 1.0 + 0j
    for c in range(n):
        p = c + int(np.argmax(np.abs(lu[c:, c])))
        if lu[p, c] == 0:
            return 0j
        if p != c:
            lu[[c, p]] = lu[[p, c]]
            det = -det
        det *= lu[c, c]
        lu[c + 1:, c:] -= np.outer(lu[c + 1:, c] / lu[c, c], lu[c, c:])
    return complex(det)


@dataclass(frozen=True, eq=False)
class FockBasis:
    """Occupation states on M modes with at most ``p_cap`` particles.

    Ordered by total particle number, then lexicographically.
    """

    statistics: Statistics
    M: int
    p_cap: int

    @cached_property
    def states(self) -> list[tuple[int, ...]]:
        top = 1 if self.statistics is Statistics.FERMION else self.p_cap
        occs = [o for o in product(range(top + 1), repeat=self.M) if sum(o) <= self.p_cap]
        return sorted(occs, key=lambda o: (sum(o), o))

    @cached_property
    def index(self) -> dict[tuple[int, ...], int]:
        return {o: i for i, o in enumerate(self.states)}

    def __len__(self):
        return len(self.states)

    @cached_property
    def creators(self) -> list[sp.csr_matrix]:
        """a_i^dagger as sparse matrices; images beyond ``p_cap`` are dropped."""
        mats = []
        for i in range(self.M):
            rows, cols, vals = [], [], []
            for col, occ in enumerate(self.states):
                if sum(occ) >= self.p_cap:
                    continue
                if self.statistics is Statistics.BOSON:
                    val = math.sqrt(occ[i] + 1)
                else:
                    if occ[i]:
                        continue
                    val = (-1) ** sum(occ[:i])
                new = occ[:i] + (occ[i] + 1,) + occ[i + 1:]
                rows.append(self.index[new])
                cols.append(col)
                vals.append(val)
            mats.append(sp.csr_matrix((vals, (rows, cols)), shape=(len(self), len(self)), dtype=complex))
        return mats

    @cached_property
    def annihilators(self) -> list[sp.csr_matrix]:
        return [c.conj().T.tocsr() for c in self.creators]

    def vacuum(self) -> np.ndarray:
        v = np.zeros(len(self), dtype=complex)
        v[0] = 1.0
        return v


@dataclass(eq=False)
class FockVector:
    basis: FockBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (len(self.basis),):
            raise ValueError("amplitude vector length does not match the basis")

    def inner(self, other: "FockVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@lru_cache(maxsize=32)
def fock_basis(statistics: Statistics, M: int, p_cap: int) -> FockBasis:
    """Shared basis instance, so the operator matrices are built once."""
    return FockBasis(Statistics(statistics), M, p_cap)


def _creation_string(occ) -> list[int]:
    return [i for i, n in enumerate(occ) for _ in range(n)]


def _string_norm(occ) -> float:
    """sqrt(prod n_i!) accumulated in the order the ladder matrices apply it.

    Matching the order makes P(1) reproduce basis vectors bit for bit.
    """
    norm = 1.0
    for i in reversed(range(len(occ))):
        for j in range(1, occ[i] + 1):
            norm = math.sqrt(j) * norm
    return norm


def _apply_string(modes, ops, vec) -> np.ndarray:
    # ops[j] acting for each mode j of the written string, rightmost first
    for j in reversed(modes):
        vec = ops[j] @ vec
    return vec


def _mapped_creators(basis: FockBasis, U: np.ndarray) -> list[sp.csr_matrix]:
    """b_j^dagger = sum_i U[i, j] a_i^dagger."""
    return [sum((U[i, j] * basis.creators[i] for i in range(basis.M) if U[i, j] != 0),
                sp.csr_matrix((len(basis), len(basis)), dtype=complex))
            for j in range(basis.M)]


def apply_multiplicative_extension(U, psi: FockVector) -> FockVector:
    """P(U) psi by substituting a_j^dagger -> sum_i U[i, j] a_i^dagger in every creation string."""
    U = np.asarray(U, dtype=complex)
    basis = psi.basis
    if U.shape != (basis.M, basis.M):
        raise ValueError(f"U must be {basis.M} x {basis.M}")
    return FockVector(basis, _apply_mapped(_mapped_creators(basis, U), basis, psi.amplitudes))


def _apply_mapped(mapped, basis: FockBasis, amplitudes) -> np.ndarray:
    out = np.zeros(len(basis), dtype=complex)
    for idx in np.nonzero(amplitudes)[0]:
        occ = basis.states[idx]
        out += amplitudes[idx] / _string_norm(occ) * _apply_string(_creation_string(occ), mapped, basis.vacuum())
    return out


def multiplicative_extension_matrix(U, basis: FockBasis) -> np.ndarray:
    """Matrix of P(U) on the whole truncated basis, column by column."""
    mapped = _mapped_creators(basis, np.asarray(U, dtype=complex))
    return np.array([_apply_mapped(mapped, basis, e) for e in np.eye(len(basis), dtype=complex)]).T


def _embed(state: ProductState, basis: FockBasis, creators) -> np.ndarray:
    """C_1 C_2 ... C_N |vac> with C_mu the block's creation polynomial built from ``creators``."""
    offsets = np.concatenate([[0], np.cumsum([f.d for f in state.factors])])
    vec = basis.vacuum()
    for mu in reversed(range(state.N)):
        factor = state.factors[mu]
        new = np.zeros_like(vec)
        for occ, amp in factor.terms.items():
            modes = [int(offsets[mu]) + i for i in _creation_string(occ)]
            new += amp / _string_norm(occ) * _apply_string(modes, creators, vec)
        vec = new
    return vec


def embed_product_state(state: ProductState, basis: FockBasis) -> FockVector:
    return FockVector(basis, _embed(state, basis, basis.creators))


def _total_particles(state: ProductState) -> int:
    return sum(f.n_max for f in state.factors)


def brute_force_expectation(bra: ProductState, ket: ProductState, A) -> complex:
    """<bra| P(1 + A) |ket> on the full M-mode truncated Fock space.

    P(1 + A) is applied to the product ket block by block: each creation
    operator in the ket's creation strings is replaced by its image under
    1 + A, which is the defining action of the multiplicative extension.
    """
    A = np.asarray(A, dtype=complex)
    M = ket.M
    if A.shape != (M, M):
        raise ValueError(f"A must be {M} x {M}")
    p_cap = max(_total_particles(bra), _total_particles(ket))
    if M > MAX_ORACLE_MODES or p_cap > MAX_ORACLE_PARTICLES:
        raise OracleSizeError(f"{M} modes / {p_cap} particles exceed the oracle caps "
                              f"({MAX_ORACLE_MODES}, {MAX_ORACLE_PARTICLES})")
    basis = fock_basis(ket.statistics, M, p_cap)
    bra_vec = _embed(bra, basis, basis.creators)
    ket_image = _embed(ket, basis, _mapped_creators(basis, np.eye(M) + A))
    return complex(np.vdot(bra_vec, ket_image))


def normal_ordered_expansion_check(A, p_cap: int, statistics=Statistics.BOSON) -> float:
    """Largest entry of |sum_r :(a^dagger A a)^r:/r! - P(1 + A)| on the truncated space."""
    A = np.asarray(A, dtype=complex)
    M = A.shape[0]
    if M > 6 or p_cap > 4:
        raise OracleSizeError(f"normal-ordered check limited to M <= 6, p_cap <= 4 (got {M}, {p_cap})")
    basis = fock_basis(Statistics(statistics), M, p_cap)
    cre, ann = basis.creators, basis.annihilators
    term = sp.identity(len(basis), dtype=complex, format="csr")
    series = term.toarray()
    for r in range(1, p_cap + 1):
        # :X^r: = sum_ij A_ij a_i^dagger :X^(r-1): a_j
        term = sum((A[i, j] * (cre[i] @ term @ ann[j]) for i in range(M) for j in range(M) if A[i, j] != 0),
                   sp.csr_matrix((len(basis), len(basis)), dtype=complex))
        series = series + term.toarray() / math.factorial(r)
    direct = multiplicative_extension_matrix(np.eye(M) + A, basis)
    return float(np.max(np.abs(series - direct)))
