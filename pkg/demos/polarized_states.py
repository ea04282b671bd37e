"""Negative-norm sections versus polarized states.

The path-integral pairing is indefinite on arbitrary sections of the line
bundle, but on states of a positive linear polarization it is a fixed
multiple of the L2 pairing.
"""
import numpy as np

from pathquant import states as ss
from pathquant.grid import GridSpec

hbar = 1.0

spec = GridSpec(6.0, 24)
witness, value, eig = ss.negative_norm_witness(spec, hbar)
print(f"smallest eigenvalue of the pairing on a {spec.n}x{spec.n} grid: {eig:+.6f}")
print(f"decaying witness: <psi|psi> / |psi|^2 = {value:+.6f}  (boundary ratio {witness.boundary_ratio():.1e})")

spec = GridSpec(12.0, 64)
c = ss.calibrate_pairing_constant(spec, hbar)
print(f"\npairing constant measured on the ground state: {c:.8f}  (1/(pi hbar) = {1 / np.pi:.8f})")

rng = np.random.default_rng(0)
pol = ss.LinearPolarization.random(rng, 0.15)
print("random polarization matrix:\n", np.round(pol.matrix, 4))
basis = [ss.make_polarized(pol, ss.hermite_profile(n, np.sqrt(2 * hbar)), spec, hbar).normalized()
         for n in range(4)]
print(" n1 n0   path-integral           C * L2")
for i in range(4):
    for j in range(i, 4):
        a, b = ss.pathintegral_inner(basis[i], basis[j]), c * ss.l2_inner(basis[i], basis[j])
        print(f"  {i}  {j}   {a.real:+.6f}{a.imag:+.6f}j   {b.real:+.6f}{b.imag:+.6f}j")
