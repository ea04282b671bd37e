"""Prescription dependence of Riemann sums along Brownian paths, and its
absence (to first order) along smooth paths."""
from pathquant import stochastic as wn

print("f(x) = x: midpoint - left-point sums, 2000 paths")
print("  n_steps   mean      se        L2 error vs 1/2 int f'")
for r in wn.correction_experiment("x", [2 ** k for k in range(4, 11)], 2000, seed=1):
    print(f"  {r['n_steps']:6d}  {r['mean_d']:.4f}  {r['se_d']:.4f}  {r['l2_error']:.2e}")

print("\nsmooth path: gap between prescriptions and its prediction 1/2 sum f'(x_i) dx_i^2")
for n in (2 ** 8, 2 ** 10, 2 ** 12):
    gap, pred = wn.smooth_path_gap("sin", n)
    print(f"  n = {n:5d}: gap {gap:.3e}, predicted {pred:.3e}")
