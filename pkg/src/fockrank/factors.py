"""Per-block auxiliary polynomials f_mu.

For a block with bra state <B|, ket state |K> and operator slices u (d x k),
v (k x d), the factor is

    f = <B| exp(sum_a z_a udag_a) exp(sum_a vhat_a z*_a) |K>,

    udag_a = sum_i u[i, a] a_i^dagger,    vhat_a = sum_j v[a, j] a_j.

Bosonic coefficients: c(m, n) = <B| prod (udag_a)^m_a / m_a! prod (vhat_a)^n_a / n_a! |K>.

Fermionic coefficients use Grassmann variables that anticommute with the
fermionic operators.  Expanding both exponentials, pulling every Grassmann
generator to the far left (past the bra's creation string as well) and
sorting into the interleaved canonical order gives, for z-set T and z*-set T',

    c(T, T') = s * <B_b| udag_T vhat_T' |K>,
    s = eps(|T|) eps(|T'|) (-1)^(|T| b + |T'| (1 + |T| + b)) * reorder(T, T'),

with eps(r) = (-1)^(r(r-1)/2), b the particle-number parity of the bra
component B_b, and both operator strings written in ascending a.  The bra
parity is kept separately because the product over blocks needs it (see
:mod:`fockrank.engine`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import FactorState, Statistics
from .grassmann import GrassmannElement, reorder_sign
from .poly import BidegreePoly, OpCounter, ranking


def _lower(terms: dict, c: np.ndarray, stats: Statistics) -> dict:
    """sum_j c[j] a_j applied to an occupation-basis vector."""
    out: dict[tuple[int, ...], complex] = {}
    for occ, amp in terms.items():
        below = 0
        for j, nj in enumerate(occ):
            if nj and c[j] != 0:
                if stats is Statistics.BOSON:
                    factor = math.sqrt(nj)
                else:
                    factor = -1.0 if below & 1 else 1.0
                new = occ[:j] + (nj - 1,) + occ[j + 1:]
                out[new] = out.get(new, 0j) + amp * c[j] * factor
            below += nj
    return {o: a for o, a in out.items() if a != 0}


def _raise(terms: dict, c: np.ndarray, stats: Statistics, max_total: int | None = None) -> dict:
    """sum_i c[i] a_i^dagger applied to an occupation-basis vector."""
    out: dict[tuple[int, ...], complex] = {}
    for occ, amp in terms.items():
        if max_total is not None and sum(occ) + 1 > max_total:
            continue
        below = 0
        for i, ni in enumerate(occ):
            if c[i] != 0:
                if stats is Statistics.BOSON:
                    factor = math.sqrt(ni + 1)
                elif ni == 0:
                    factor = -1.0 if below & 1 else 1.0
                else:
                    factor = 0.0
                if factor:
                    new = occ[:i] + (ni + 1,) + occ[i + 1:]
                    out[new] = out.get(new, 0j) + amp * c[i] * factor
            below += ni
    return {o: a for o, a in out.items() if a != 0}


def apply_lowering_string(state: FactorState, v_block, n, descending: bool = False) -> FactorState:
    """prod_a (vhat_a)^n_a / n_a! |state> with vhat_a = sum_j v_block[a, j] a_j.

    The product is written with ``a`` ascending from left to right, so the
    operator with the largest ``a`` acts first; ``descending=True`` reverses
    the written order.  Only fermions are sensitive to the order.
    """
    v_block = np.asarray(v_block, dtype=complex)
    terms = dict(state.terms)
    alphas = range(len(n)) if descending else reversed(range(len(n)))
    scale = 1.0
    for a in alphas:
        for _ in range(n[a]):
            terms = _lower(terms, v_block[a], state.statistics)
        scale *= math.factorial(n[a])
    return FactorState(state.d, {o: amp / scale for o, amp in terms.items()}, state.statistics)


def apply_raising_string(state: FactorState, u_block, m, max_total: int | None = None) -> FactorState:
    """prod_a (udag_a)^m_a / m_a! |state> with udag_a = sum_i u_block[i, a] a_i^dagger.

    Written with ``a`` ascending from left to right.  Terms with more than
    ``max_total`` particles are dropped as they appear; pass the bra's
    particle bound when the result is only paired against that bra.
    """
    u_block = np.asarray(u_block, dtype=complex)
    terms = dict(state.terms)
    scale = 1.0
    for a in reversed(range(len(m))):
        for _ in range(m[a]):
            terms = _raise(terms, u_block[:, a], state.statistics, max_total)
        scale *= math.factorial(m[a])
    return FactorState(state.d, {o: amp / scale for o, amp in terms.items()}, state.statistics)


@dataclass(frozen=True, eq=False)
class FactorPolynomial:
    """f_mu for one block.

    Bosonic factors carry ``poly``.  Fermionic factors carry ``grassmann``
    (the full f_mu) and ``odd_bra``, the part contributed by the odd
    particle-number component of the bra.
    """

    statistics: Statistics
    n_max: int
    poly: BidegreePoly | None = None
    grassmann: GrassmannElement | None = None
    odd_bra: GrassmannElement | None = None
    block: int | None = None

    @property
    def element(self):
        return self.poly if self.statistics is Statistics.BOSON else self.grassmann


def _inner(bra: dict, ket: dict) -> complex:
    if len(bra) > len(ket):
        return sum((bra[o].conjugate() * a for o, a in ket.items() if o in bra), 0j)
    return sum((a.conjugate() * ket[o] for o, a in bra.items() if o in ket), 0j)


def _boson_family(terms: dict, rows: np.ndarray, max_deg: int) -> dict:
    """prod_a (w_a)^n_a / n_a! |terms> for every |n| <= max_deg, w_a = sum_j rows[a, j] a_j."""
    k = rows.shape[0]
    r = ranking(k)
    r.grow(max_deg)
    family = {(0,) * k: terms}
    for vec in r.vectors[1: math.comb(max_deg + k, k)]:
        n = tuple(int(x) for x in vec)
        a = next(i for i, x in enumerate(n) if x)
        prev = family[n[:a] + (n[a] - 1,) + n[a + 1:]]
        lowered = _lower(prev, rows[a], Statistics.BOSON)
        family[n] = {o: amp / n[a] for o, amp in lowered.items()}
    return family


def _fermion_family(terms: dict, rows: np.ndarray, descending: bool) -> dict:
    """Operator strings over subsets T of {0..k-1} (bitmask keys).

    ``descending=False`` gives w_{t1} w_{t2} ... w_{tr} |terms> with t
    ascending, so the smallest index acts last; ``True`` gives the string
    written in the opposite order, w_{tr} ... w_{t1} |terms>.
    """
    k = rows.shape[0]
    family = {0: terms}
    for T in range(1, 2 ** k):
        if descending:
            a = T.bit_length() - 1
        else:
            a = (T & -T).bit_length() - 1
        family[T] = _lower(family[T ^ (1 << a)], rows[a], Statistics.FERMION)
    return family


def _eps(r: int) -> int:
    return -1 if (r * (r - 1) // 2) & 1 else 1


def fermion_coefficient_sign(T: int, Tp: int, bra_parity: int) -> int:
    """Sign attaching <B_b| udag_T vhat_T' |K> to the canonical monomial of (T, T')."""
    r, rp = bin(T).count("1"), bin(Tp).count("1")
    s = _eps(r) * _eps(rp)
    if (r * bra_parity + rp * (1 + r + bra_parity)) & 1:
        s = -s
    return s * reorder_sign(_z_mask(T), _z_mask(Tp) << 1)


def _z_mask(T: int) -> int:
    return sum(1 << (2 * a) for a in range(T.bit_length()) if (T >> a) & 1)


def _pair_mask(T: int, Tp: int) -> int:
    return _z_mask(T) | (_z_mask(Tp) << 1)


def build_factor(state: FactorState, u_block, v_block, ket: FactorState | None = None,
                 block: int | None = None, counter: OpCounter | None = None) -> FactorPolynomial:
    """f_mu from bra ``state``, ket ``ket`` (defaults to ``state``) and the block's slices.

    Bra strings are evaluated by letting the adjoint operators act on the bra.
    """
    bra = state
    ket = state if ket is None else ket
    if bra.statistics is not ket.statistics or bra.d != ket.d:
        raise ValueError("bra and ket of a block must share statistics and mode count")
    u_block = np.asarray(u_block, dtype=complex)
    v_block = np.asarray(v_block, dtype=complex)
    k = v_block.shape[0]
    if u_block.shape != (bra.d, k) or v_block.shape != (k, bra.d):
        raise ValueError(f"slice shapes {u_block.shape}, {v_block.shape} do not match d={bra.d}, k={k}")
    u_adj = u_block.conj().T
    n_max = max(bra.n_max, ket.n_max)
    ops = 0

    if bra.statistics is Statistics.BOSON:
        kets = _boson_family(dict(ket.terms), v_block, ket.n_max)
        bras = _boson_family(dict(bra.terms), u_adj, bra.n_max)
        terms = {}
        for m, bm in bras.items():
            if not bm:
                continue
            for n, kn in kets.items():
                if kn:
                    ops += min(len(bm), len(kn))
                    c = _inner(bm, kn)
                    if c != 0:
                        terms[(m, n)] = c
        if counter is not None:
            counter.add(ops)
        return FactorPolynomial(Statistics.BOSON, n_max, poly=BidegreePoly.from_terms(k, terms, cap=n_max),
                                block=block)

    kets = _fermion_family(dict(ket.terms), v_block, descending=False)
    parts = []
    for b in (0, 1):
        elem = GrassmannElement.zeros(k)
        bra_b = bra.parity_part(b)
        if not bra_b.is_zero:
            bras = _fermion_family(dict(bra_b.terms), u_adj, descending=True)
            for T, bt in bras.items():
                if not bt:
                    continue
                for Tp, kt in kets.items():
                    if kt:
                        ops += min(len(bt), len(kt))
                        c = _inner(bt, kt)
                        if c != 0:
                            elem.coeffs[_pair_mask(T, Tp)] += fermion_coefficient_sign(T, Tp, b) * c
        parts.append(elem)
    if counter is not None:
        counter.add(ops)
    return FactorPolynomial(Statistics.FERMION, n_max, grassmann=parts[0] + parts[1], odd_bra=parts[1],
                            block=block)


def build_factor_single_boson(u_row, v_col, block: int | None = None) -> FactorPolynomial:
    """f = 1 + (sum_a u_a z_a)(sum_a v_a z*_a) for the state a^dagger |vac> on one mode."""
    u_row = np.asarray(u_row, dtype=complex).reshape(-1)
    v_col = np.asarray(v_col, dtype=complex).reshape(-1)
    k = len(u_row)
    r = ranking(k)
    p = BidegreePoly.zeros(k, 1, 1, 1)
    p.coeffs[0, 0] = 1.0
    # Ranks 1..k hold the unit vectors in graded order.
    idx = np.array([r.rank(tuple(int(i == a) for i in range(k))) for a in range(k)])
    p.coeffs[np.ix_(idx, idx)] += np.outer(u_row, v_col)
    return FactorPolynomial(Statistics.BOSON, 1, poly=p, block=block)


def build_factor_single_fermion(u_row, v_col, block: int | None = None) -> FactorPolynomial:
    """f for the state a^dagger |vac> on one fermionic mode.

    f = 1 + sum_{a,b} u_a v_b s_ab z_a z*_b with s_ab = -1 when a > b (sorting
    z_a past z*_b).  The whole factor comes from the odd bra component.
    """
    u_row = np.asarray(u_row, dtype=complex).reshape(-1)
    v_col = np.asarray(v_col, dtype=complex).reshape(-1)
    k = len(u_row)
    e = GrassmannElement.one(k)
    for a in range(k):
        for b in range(k):
            e.coeffs[(1 << (2 * a)) | (1 << (2 * b + 1))] += (-1.0 if a > b else 1.0) * u_row[a] * v_col[b]
    return FactorPolynomial(Statistics.FERMION, 1, grassmann=e, odd_bra=e, block=block)
