"""Generalized Riemann sums: refinement, exactness of the area cochain and
a closed pair on the disk that gives the same answer on every triangulation."""
import numpy as np

from pathquant import simplicial as sx

print("left-point sums of x^2 on [0, 1] under barycentric refinement")
for level, count, value, err in sx.converge(sx.left_point(lambda x: x * x), sx.uniform_interval(0, 1, 8), 5, 1 / 3):
    print(f"  level {level}: {count:4d} pieces  sum {value.real:.6f}  error {err:.2e}")

print("\nsigned-area cochain on the unit square")
for level, count, value, err in sx.converge(sx.signed_area(), sx.unit_square(), 4, 1.0):
    print(f"  level {level}: {count:5d} triangles  sum {value.real!r}")


def form(x):
    return np.stack([x[:, 0] * x[:, 1] - x[:, 1] ** 3, x[:, 0] ** 2 * x[:, 1] + x[:, 0]], axis=1)


pair, _ = sx.disk_circulation_pair(form)
circ = np.pi + 3 * np.pi / 4
rng = np.random.default_rng(3)
print(f"\nclosed pair on the unit disk; circulation = {circ:.15f}")
for _ in range(5):
    tri = sx.random_disk(rng, 1.0, int(rng.integers(8, 30)), int(rng.integers(5, 40)))
    lhs, _ = sx.stokes_pair(pair, tri, circ)
    print(f"  {len(tri.simplices):3d} triangles: {lhs.real:.15f}")
