"""
Permanents of low-rank-shifted matrices
=======================================

A product of N single-boson states, one boson per mode, turns the matrix
element of P(1 + u v) into the permanent Per(1 + u v).  Each block then
contributes the factor 1 + (sum_a u_a z_a)(sum_b v_b z*_b), and the Gaussian
average of their product is the permanent.
"""

import numpy as np

from fockrank import permanent_rank_shifted, ryser_permanent

rng = np.random.default_rng(7)

# a 2 x 2 case by hand: 1 + u v = [[2, 1], [1, 2]], Per = 4 + 1
u = np.ones((2, 1))
v = np.ones((1, 2))
print("Per([[2,1],[1,2]]) =", permanent_rank_shifted(u, v).value)

# random rank-2 shifts, against Ryser's formula
for N in (4, 8, 12):
    u = rng.uniform(-1, 1, (N, 2)) + 1j * rng.uniform(-1, 1, (N, 2))
    v = rng.uniform(-1, 1, (2, N)) + 1j * rng.uniform(-1, 1, (2, N))
    rep = permanent_rank_shifted(u, v)
    ref = ryser_permanent(np.eye(N) + u @ v)
    print(f"N={N:2d}  engine {rep.value:.6f}  Ryser {ref:.6f}  "
          f"rel err {abs(rep.value - ref) / abs(ref):.1e}  ops {rep.op_count}")

# Ryser needs 2^N steps; the engine stays polynomial, so N = 120 is cheap
N = 120
u = rng.uniform(-1, 1, (N, 1)) / 4
v = rng.uniform(-1, 1, (1, N)) / 4
rep = permanent_rank_shifted(u, v)
print(f"N={N}: Per(1 + uv) = {rep.value.real:.6e} in {rep.wall_time:.2f} s, {rep.op_count} multiply-adds")
