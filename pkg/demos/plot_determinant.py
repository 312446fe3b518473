"""
Determinants and the fermionic engine
=====================================

With one fermion per mode the matrix element becomes det(1 + u v).  The
Grassmann engine computes it with a fixed amount of work per block; the
k x k identity det(1 + u v) = det(1 + v u) is a much cheaper route and is
what ``fockrank compute --fast-path sylvester`` uses.
"""

import numpy as np

from fockrank import dense_determinant, determinant_fast, determinant_rank_shifted

rng = np.random.default_rng(11)

for N, k in [(5, 1), (10, 2), (12, 3)]:
    u = rng.uniform(-1, 1, (N, k)) + 1j * rng.uniform(-1, 1, (N, k))
    v = rng.uniform(-1, 1, (k, N)) + 1j * rng.uniform(-1, 1, (k, N))
    engine = determinant_rank_shifted(u, v)
    print(f"N={N:2d} k={k}  engine {engine.value:.8f}")
    print(f"            det(1+uv) {dense_determinant(np.eye(N) + u @ v):.8f}")
    print(f"            det(1+vu) {determinant_fast(u, v):.8f}")

# the work per block depends on k only
for N in (1000, 10000):
    u = rng.uniform(-1, 1, (N, 2)) / np.sqrt(N)
    v = rng.uniform(-1, 1, (2, N)) / np.sqrt(N)
    rep = determinant_rank_shifted(u, v)
    print(f"N={N:5d}: {rep.op_count} ops, {rep.op_count / N:.0f} per block")
