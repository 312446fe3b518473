"""
General product states against brute force
===========================================

Blocks may hold several modes and superpositions of occupations, and bra
and ket may differ.  For small instances the result can be checked on the
full truncated Fock space, where P(1 + A) is built directly from creation
operators.
"""

import numpy as np

from fockrank import (
    FactorState, LowRankOperator, Statistics, brute_force_expectation, expectation, product_state,
)

rng = np.random.default_rng(3)

bra = product_state([
    FactorState(2, {(1, 0): 0.6, (0, 1): 0.8j}),
    FactorState(1, {(0,): 0.5, (2,): np.sqrt(3) / 2}),
])
ket = product_state([
    FactorState(2, {(1, 1): 1.0}),
    FactorState(1, {(1,): 1.0}),
])
u = rng.uniform(-1, 1, (3, 2)) + 1j * rng.uniform(-1, 1, (3, 2))
v = rng.uniform(-1, 1, (2, 3)) + 1j * rng.uniform(-1, 1, (2, 3))
op = LowRankOperator(u, v)

rep = expectation(bra, ket, op)
print("bosons   engine     ", rep.value)
print("bosons   brute force", brute_force_expectation(bra, ket, op.dense()))

# the same layout with fermions; odd-parity blocks exercise the graded product
fbra = product_state([
    FactorState(2, {(1, 0): 0.6, (1, 1): 0.8}, Statistics.FERMION),
    FactorState(1, {(0,): 0.5, (1,): np.sqrt(3) / 2}, Statistics.FERMION),
])
rep = expectation(fbra, None, op)
print("fermions engine     ", rep.value)
print("fermions brute force", brute_force_expectation(fbra, fbra, op.dense()))
