import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fockrank.bench import random_factor
from fockrank.core import FactorState, Statistics, product_state
from fockrank.factors import (
    apply_lowering_string, apply_raising_string, build_factor, build_factor_single_boson,
    build_factor_single_fermion, fermion_coefficient_sign,
)
from fockrank.grassmann import GrassmannElement
from fockrank.oracles import _embed, fock_basis

from conftest import crandn

B, F = Statistics.BOSON, Statistics.FERMION


def test_lowering_vacuum_gives_zero():
    assert apply_lowering_string(FactorState.vacuum(2), np.ones((1, 2)), (1,)).is_zero


def test_lowering_one_boson():
    assert dict(apply_lowering_string(FactorState(1, {(1,): 1}), np.array([[3.0]]), (1,)).terms) == {(0,): 3}


def test_lowering_two_bosons():
    out = apply_lowering_string(FactorState(1, {(2,): 1}), np.array([[1.0]]), (2,))
    assert out.terms[(0,)] == pytest.approx(math.sqrt(2) / 2, abs=1e-15)


def test_raising_vacuum():
    assert dict(apply_raising_string(FactorState.vacuum(1), np.array([[2.0]]), (1,)).terms) == {(1,): 2}


def test_raising_pauli():
    assert apply_raising_string(FactorState(1, {(1,): 1}, F), np.array([[1.0]]), (1,)).is_zero


def test_raising_two_modes():
    out = dict(apply_raising_string(FactorState.vacuum(2), np.array([[1.0], [1.0]]), (2,)).terms)
    assert out.keys() == {(2, 0), (1, 1), (0, 2)}
    assert out[(2, 0)] == pytest.approx(math.sqrt(2) / 2)
    assert out[(1, 1)] == pytest.approx(1.0)
    assert out[(0, 2)] == pytest.approx(math.sqrt(2) / 2)


def test_raising_truncation():
    out = apply_raising_string(FactorState.vacuum(1), np.array([[1.0]]), (3,), max_total=2)
    assert out.is_zero


def test_single_boson_example():
    f = build_factor(FactorState.single_particle(), np.array([[2.0]]), np.array([[3.0]]))
    assert f.poly.as_dict() == {((0,), (0,)): 1, ((1,), (1,)): 6}


def test_single_boson_fast_examples():
    assert build_factor_single_boson([2.0], [3.0]).poly.as_dict() == {((0,), (0,)): 1, ((1,), (1,)): 6}
    p = build_factor_single_boson([1.0, 0.0], [0.0, 1.0]).poly
    assert p.as_dict() == {((0, 0), (0, 0)): 1, ((1, 0), (0, 1)): 1}


@pytest.mark.parametrize("stats", [B, F])
def test_vacuum_factor_is_one(stats, rng):
    f = build_factor(FactorState.vacuum(2, stats), crandn(rng, 2, 2), crandn(rng, 2, 2))
    if stats is B:
        assert f.poly.as_dict() == {((0, 0), (0, 0)): 1}
    else:
        np.testing.assert_array_equal(f.grassmann.coeffs, GrassmannElement.one(2).coeffs)


def test_single_fermion_magnitude():
    a, b = 0.7 - 0.2j, -1.3 + 0.5j
    f = build_factor(FactorState.single_particle(F), np.array([[a]]), np.array([[b]]))
    assert f.grassmann.coeffs[0] == 1
    assert abs(f.grassmann.coeffs[0b11]) == pytest.approx(abs(a * b))
    assert f.grassmann.coeffs[0b01] == f.grassmann.coeffs[0b10] == 0


def test_single_boson_fast_agrees_100_seeds():
    for seed in range(100):
        rng = np.random.default_rng([seed, 10])
        k = int(rng.integers(1, 4))
        u, v = crandn(rng, 1, k), crandn(rng, k, 1)
        fast = build_factor_single_boson(u[0], v[:, 0]).poly
        ref = build_factor(FactorState.single_particle(), u, v).poly
        assert fast.shape == ref.shape
        np.testing.assert_allclose(fast.coeffs, ref.coeffs, rtol=0, atol=1e-12)


def test_single_fermion_fast_agrees_100_seeds():
    for seed in range(100):
        rng = np.random.default_rng([seed, 11])
        k = int(rng.integers(1, 4))
        u, v = crandn(rng, 1, k), crandn(rng, k, 1)
        fast = build_factor_single_fermion(u[0], v[:, 0])
        ref = build_factor(FactorState.single_particle(F), u, v)
        np.testing.assert_allclose(fast.grassmann.coeffs, ref.grassmann.coeffs, rtol=0, atol=1e-12)
        np.testing.assert_allclose(fast.odd_bra.coeffs, ref.odd_bra.coeffs, rtol=0, atol=1e-12)


def _oracle_coefficients(stats, bra, ket, u, v):
    """c(m, n) from explicit truncated-Fock matrices on one block."""
    d, k = u.shape
    p_cap = max(bra.n_max, ket.n_max)
    basis = fock_basis(stats, d, max(p_cap, 1))
    cre = [sum(u[i, a] * basis.creators[i] for i in range(d)) for a in range(k)]
    ann = [sum(v[a, j] * basis.annihilators[j] for j in range(d)) for a in range(k)]
    ket_vec = _embed(product_state([ket]), basis, basis.creators)
    top = p_cap if stats is B else 1
    out = {}
    for b in (0, 1) if stats is F else (None,):
        part = bra if b is None else bra.parity_part(b)
        if part.is_zero:
            continue
        bra_vec = _embed(product_state([part]), basis, basis.creators)
        for m in np.ndindex(*([top + 1] * k)):
            for n in np.ndindex(*([top + 1] * k)):
                w = ket_vec
                for a in reversed(range(k)):
                    for _ in range(n[a]):
                        w = ann[a] @ w
                for a in reversed(range(k)):
                    for _ in range(m[a]):
                        w = cre[a] @ w
                c = np.vdot(bra_vec, w) / math.prod(math.factorial(x) for x in m + n)
                out[(b, m, n)] = c
    return out


@pytest.mark.parametrize("stats", [B, F])
def test_coefficients_match_oracle(stats):
    for seed in range(25):
        rng = np.random.default_rng([seed, 12])
        d, k = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        n_max = min(2, d) if stats is F else 2
        bra = random_factor(rng, d, n_max, stats)
        ket = random_factor(rng, d, n_max, stats) if seed % 2 else bra
        u, v = crandn(rng, d, k), crandn(rng, k, d)
        f = build_factor(bra, u, v, ket=ket)
        for (b, m, n), ref in _oracle_coefficients(stats, bra, ket, u, v).items():
            if stats is B:
                got = f.poly.coefficient(m, n)
            else:
                T = sum(1 << a for a in range(k) if m[a])
                Tp = sum(1 << a for a in range(k) if n[a])
                mask = sum(1 << (2 * a) for a in range(k) if m[a]) | sum(1 << (2 * a + 1) for a in range(k) if n[a])
                part = f.odd_bra if b else f.grassmann - f.odd_bra
                got = fermion_coefficient_sign(T, Tp, b) * part.coeffs[mask]
            assert abs(got - ref) <= 1e-10 * max(1.0, abs(ref)), (seed, b, m, n)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), d=st.integers(1, 3), k=st.integers(1, 3), n_max=st.integers(0, 3))
def test_boson_degree_bound(seed, d, k, n_max):
    rng = np.random.default_rng(seed)
    state = random_factor(rng, d, n_max, B)
    f = build_factor(state, crandn(rng, d, k), crandn(rng, k, d))
    for m, n, _ in f.poly.terms():
        assert sum(m) <= state.n_max and sum(n) <= state.n_max


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), d=st.integers(1, 3), k=st.integers(1, 2), p=st.integers(0, 3))
def test_boson_number_conservation(seed, d, k, p):
    rng = np.random.default_rng(seed)
    occs = [o for o in np.ndindex(*([p + 1] * d)) if sum(o) == p]
    state = FactorState(d, {o: complex(*rng.normal(size=2)) for o in occs})
    f = build_factor(state, crandn(rng, d, k), crandn(rng, k, d))
    assert all(sum(m) == sum(n) for m, n, _ in f.poly.terms())


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), d=st.integers(1, 3), k=st.integers(1, 2))
def test_fermion_number_conservation(seed, d, k):
    rng = np.random.default_rng(seed)
    p = int(rng.integers(0, d + 1))
    occs = [o for o in np.ndindex(*([2] * d)) if sum(o) == p]
    state = FactorState(d, {o: complex(*rng.normal(size=2)) for o in occs}, F)
    f = build_factor(state, crandn(rng, d, k), crandn(rng, k, d))
    for mask in np.nonzero(f.grassmann.coeffs)[0]:
        zs = bin(int(mask) & int("01" * k, 2)).count("1")
        stars = bin(int(mask) & int("10" * k, 2)).count("1")
        assert zs == stars


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), d=st.integers(1, 2), k=st.integers(1, 2))
def test_boson_conjugation(seed, d, k):
    rng = np.random.default_rng(seed)
    state = random_factor(rng, d, 2, B)
    u, v = crandn(rng, d, k), crandn(rng, k, d)
    f = build_factor(state, u, v).poly
    g = build_factor(state, v.conj().T, u.conj().T).poly
    a, b = f.adjoint().as_dict(), g.as_dict()
    for key in set(a) | set(b):
        assert abs(a.get(key, 0) - b.get(key, 0)) <= 1e-12


@pytest.mark.parametrize("stats", [B, F])
def test_zero_operator_gives_norm(stats, rng):
    state = random_factor(rng, 2, 2, stats)
    f = build_factor(state, np.zeros((2, 2)), np.zeros((2, 2)))
    norm = sum(abs(a) ** 2 for a in state.terms.values())
    if stats is B:
        assert f.poly.as_dict().keys() == {((0, 0), (0, 0))}
        assert f.poly.coefficient((0, 0), (0, 0)) == pytest.approx(norm)
    else:
        assert np.count_nonzero(f.grassmann.coeffs) == 1
        assert f.grassmann.coeffs[0] == pytest.approx(norm)
