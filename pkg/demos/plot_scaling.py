"""
Operation-count scaling
=======================

The bosonic running product has O(N^{2k}) coefficients and is updated N
times, so the multiply-add count grows like N^{2k+1}.  The Grassmann table
has a fixed 4^k entries, so the fermionic count is linear in N.  Slopes
below come from a least-squares fit of log(op_count) against log(N).
"""

from fockrank.bench import bench_scaling

for k, ns in [(1, [16, 32, 64, 128, 256]), (2, [16, 24, 32, 48])]:
    records, fit = bench_scaling(k, "boson", ns)
    print(f"boson   k={k}: slope {fit.slope:.3f} (expected {2 * k + 1})")
    for r in records:
        print(f"    N={r.n:4d}  ops={r.op_count:>13d}  {r.wall_s:.3f} s")

for k in (1, 2, 4):
    records, fit = bench_scaling(k, "fermion", [1000, 3000, 10000, 30000])
    print(f"fermion k={k}: slope {fit.slope:.3f} (expected 1), {records[-1].op_count // records[-1].n} ops per block")
