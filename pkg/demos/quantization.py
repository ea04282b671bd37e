"""Quantizing polynomials by the triangle integral.

On vertical states exp(i p q / 2 hbar) phi(p) (windowed in q) the quantized
observables act like Weyl-ordered operators in the momentum picture.  The
Kostant-Souriau operator of p q differs from the Weyl one by exactly
i hbar / 2, which shows up as the only large discrepancy below.
"""
import numpy as np

from pathquant import quantizer as qz
from pathquant import states as ss
from pathquant.grid import GridSpec
from pathquant.observables import Observable

hbar = 1.0
spec = GridSpec(7.5, 48)
win = ss.plateau_window(3.5, 0.8)
P, Q = spec.mesh()
mask = np.abs(Q) <= 1.0
prof = ss.hermite_profile(1, 1.0)
psi = ss.make_polarized(ss.LinearPolarization.vertical(), prof, spec, hbar, window=win)


def rel(a, b):
    return np.max(np.abs(a - b)[mask]) / np.max(np.abs(b)[mask])


print("f        vs Weyl     vs Kostant-Souriau")
for text in ["1", "q", "p", "q**2", "p**2", "p*q"]:
    f = Observable.parse(text)
    out = qz.quantize_full(f, psi).values
    weyl = np.exp(0.5j * P * Q / hbar) * win(Q) * qz.weyl_oracle(f, prof(spec.axis), spec.axis, hbar,
                                                                  "momentum")[:, None]
    ks = f"{rel(out, qz.ks_prequantize(f, psi).values):.2e}" if qz.preserves_polarization(
        f, ss.LinearPolarization.vertical()) else "   n/a"
    print(f"{text:6s}   {rel(out, weyl):.2e}    {ks}")

ks = qz.ks_prequantize(Observable.parse("p*q"), psi).values
weyl_pq = qz.quantize_full(Observable.parse("p*q"), psi).values
shift = (ks - weyl_pq)[mask] / psi.values[mask]
print(f"\n(KS(pq) - Q_pq) / psi on the plateau: {np.median(shift.real):+.4f}{np.median(shift.imag):+.4f}j"
      f"  (expected -i hbar / 2)")
