"""The triangle-area star product against the Moyal series, and its
classical limit."""
import numpy as np

from pathquant import star as sx
from pathquant.observables import Observable

pts = np.array([[0.0, 0.0], [0.5, -0.4], [1.5, 1.0]])
for f, g in [("q", "p"), ("p", "q"), ("p**2", "q**2"), ("p*q", "q + p**2")]:
    a, b = Observable.parse(f), Observable.parse(g)
    num = sx.star(a, b, pts)
    ref = sx.moyal_series_oracle(a, b, 4, pts)
    print(f"{f:>5} * {g:<9} max |star - Moyal| = {np.max(np.abs(num - ref)):.1e}")

print("\nclassical limit of (1 + pq) e^{-r^2/2} * (q^2 - p) e^{-r^2/3.38} at (0.3, -0.4)")
f = Observable.parse("1 + p*q", envelope=1.0)
g = Observable.parse("q**2 - p", envelope=1.3)
pt = np.array([[0.3, -0.4]])
for h in (0.5, 0.25, 0.125, 0.0625):
    err = abs(sx.star(f, g, pt, h)[0] - f(*pt.T)[0] * g(*pt.T)[0])
    print(f"  hbar = {h:<7} |f*g - fg| = {err:.3e}")
print("\ncalibration:", sx.calibrate_star())
