"""Generalized Riemann sums of diagonal-vanishing cochains over triangulated
intervals and planar regions, barycentric refinement, the van Est
derivative and the closed-pair Stokes identity.

A cochain of arity ``n + 1`` is a function of ``n + 1`` points that
vanishes whenever all points coincide and is unchanged by even
permutations of its arguments.  Its Riemann sum over a triangulation is
the sum of its values on the positively ordered simplices.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.spatial import Delaunay

VAN_EST_STEP = 1e-3


# cochains --------------------------------------------------------------------

@dataclass(frozen=True)
class DiagonalCochain:
    """``evaluator(x0, ..., xn)`` receives arrays of shape ``(k, d)`` and
    returns ``k`` values."""

    arity: int
    evaluator: Callable
    name: str = ""

    def __call__(self, *points):
        if len(points) != self.arity:
            raise ValueError(f"cochain expects {self.arity} points, got {len(points)}")
        pts = [np.atleast_2d(np.asarray(x, dtype=float)) for x in points]
        return np.asarray(self.evaluator(*pts))

    def check(self, rng, dim, samples=20, scale=1.0, tol_diag=1e-12, tol_perm=1e-10):
        """Verify diagonal vanishing and even-permutation invariance on random points."""
        m = scale * rng.standard_normal((samples, dim))
        diag = self(*[m] * self.arity)
        if np.max(np.abs(diag)) > tol_diag:
            raise ValueError(f"cochain {self.name!r} does not vanish on the diagonal")
        pts = [m + 0.1 * scale * rng.standard_normal((samples, dim)) for _ in range(self.arity)]
        base = self(*pts)
        for perm in itertools.permutations(range(self.arity)):
            if _parity(perm) == 0:
                val = self(*[pts[i] for i in perm])
                if np.max(np.abs(val - base)) > tol_perm * max(1.0, np.max(np.abs(base))):
                    raise ValueError(f"cochain {self.name!r} is not even-permutation invariant")
        return self


def _parity(perm):
    perm = list(perm)
    swaps = 0
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            swaps += 1
    return swaps % 2


def zero_cochain(arity):
    return DiagonalCochain(arity, lambda *x: np.zeros(len(x[0])), "zero")


def left_point(f):
    """``f(x) (y - x)`` on an interval."""
    return DiagonalCochain(2, lambda x, y: f(x[:, 0]) * (y[:, 0] - x[:, 0]), "left-point")


def exact_difference(f):
    """``f(y) - f(x)``; closed, so its sums telescope."""
    return DiagonalCochain(2, lambda x, y: f(y[:, 0]) - f(x[:, 0]), "difference")


def signed_area():
    """Signed area of the planar triangle ``(x0, x1, x2)``."""

    def ev(a, b, c):
        return 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))

    return DiagonalCochain(3, ev, "signed-area")


def momentum_increment():
    """``p0 (q1 - q0)`` on phase-plane points ``(p, q)``."""
    return DiagonalCochain(2, lambda u, v: u[:, 0] * (v[:, 1] - u[:, 1]), "p-dq")


_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


def segment_integral(form):
    """Hull cochain of a 1-form ``form(x) -> (k, d)`` components: its integral
    along the straight segment from ``x`` to ``y``."""

    def ev(x, y):
        d = y - x
        t = 0.5 * (_GL_X + 1)
        total = 0.0
        for tk, wk in zip(t, 0.5 * _GL_W):
            total = total + wk * np.sum(form(x + tk * d) * d, axis=1)
        return total

    return DiagonalCochain(2, ev, "segment-integral")


_DUNAVANT = None


def _triangle_rule():
    """Collapsed Gauss rule on the reference triangle, exact to high degree."""
    global _DUNAVANT
    if _DUNAVANT is None:
        x, w = np.polynomial.legendre.leggauss(10)
        x = 0.5 * (x + 1)
        w = 0.5 * w
        s, t = np.meshgrid(x, x, indexing="ij")
        ws = np.outer(w, w)
        # (s, t) in the unit square -> (s (1 - t), s t), Jacobian s
        _DUNAVANT = (np.stack([(s * (1 - t)).ravel(), (s * t).ravel()], axis=1), (ws * s).ravel())
    return _DUNAVANT


def triangle_integral(density):
    """Hull cochain of a 2-form ``density(x) dx ^ dy``: its signed integral
    over the triangle ``(x0, x1, x2)``."""
    nodes, weights = _triangle_rule()

    def ev(a, b, c):
        e1, e2 = b - a, c - a
        jac = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
        total = 0.0
        for (s, t), w in zip(nodes, weights):
            total = total + w * density(a + s * e1 + t * e2)
        return jac * total

    return DiagonalCochain(3, ev, "triangle-integral")


def coboundary(omega):
    """``(delta omega)(x0..x_{n+1}) = sum_i (-1)^i omega(x0..^xi..x_{n+1})``."""
    k = omega.arity + 1

    def ev(*x):
        return sum((-1) ** i * omega(*(x[:i] + x[i + 1:])) for i in range(k))

    return DiagonalCochain(k, ev, f"d({omega.name})")


def pullback_cochain(omega, mapping, name=None):
    """``(f^* omega)(x0, ...) = omega(f(x0), ...)``; ``mapping`` acts on ``(k, d)`` arrays."""
    return DiagonalCochain(omega.arity, lambda *x: omega(*[mapping(xi) for xi in x]),
                           name or f"pullback({omega.name})")


# van Est -----------------------------------------------------------------------

def van_est(omega, point, directions, step=VAN_EST_STEP, tol=1e-4):
    """``n! X_n ... X_1 omega(m, ., ..., .)`` at the diagonal, by nested central
    differences with one Richardson step.

    ``directions`` holds ``n = arity - 1`` tangent vectors; ``X_i`` moves the
    ``i``-th argument.
    """
    m = np.atleast_1d(np.asarray(point, dtype=float))
    dirs = [np.atleast_1d(np.asarray(d, dtype=float)) for d in directions]
    n = omega.arity - 1
    if len(dirs) != n:
        raise ValueError(f"need {n} directions")

    def central(h):
        total = 0.0
        for signs in itertools.product((1, -1), repeat=n):
            args = [m] + [m + s * h * d for s, d in zip(signs, dirs)]
            total += np.prod(signs) * complex(omega(*[a[None, :] for a in args])[0])
        return total / (2 * h) ** n

    coarse, fine = central(step), central(step / 2)
    value = (4 * fine - coarse) / 3
    if abs(value - fine) > tol * max(1.0, abs(value)):
        raise RuntimeError("van Est difference quotient is not converging")
    return math.factorial(n) * value


# triangulations ------------------------------------------------------------------

def _signed_volume(pts):
    """Signed volume of simplices given as ``(k, n + 1, n)`` coordinates."""
    edges = pts[:, 1:, :] - pts[:, :1, :]
    n = pts.shape[2]
    return np.linalg.det(edges) / math.factorial(n) if n > 1 else edges[:, 0, 0]


@dataclass(frozen=True, eq=False)
class Triangulation:
    """Oriented triangulation of a region of ``R^n`` (n = 1 or 2).

    ``simplices[k]`` lists vertex indices; ``orientation[k] = +1`` when that
    order is positively oriented and ``-1`` when an odd permutation of it is.
    The flags agree with the orientation of the embedding, or all disagree
    with it (the reversed manifold).
    """

    vertices: np.ndarray
    simplices: np.ndarray
    orientation: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        s = np.asarray(self.simplices, dtype=np.int64)
        o = np.asarray(self.orientation, dtype=np.int64)
        n = v.shape[1]
        if n not in (1, 2) or s.ndim != 2 or s.shape[1] != n + 1:
            raise ValueError("simplices must have dimension + 1 vertices in dimension 1 or 2")
        if o.shape != (len(s),) or not np.all(np.abs(o) == 1):
            raise ValueError("orientation flags must be +1 or -1")
        vol = _signed_volume(v[s])
        if np.any(np.abs(vol) <= 1e-14 * max(1.0, np.max(np.abs(v)) ** n)):
            raise ValueError("degenerate simplex")
        rel = np.sign(vol) * o
        if not (np.all(rel == 1) or np.all(rel == -1)):
            raise ValueError("orientation flags must all agree, or all disagree, with the embedding")
        for name, arr in (("vertices", v), ("simplices", s), ("orientation", o)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        self._check_consistent()

    @property
    def dimension(self):
        return self.vertices.shape[1]

    def ordered(self):
        """Positively ordered simplices (odd swap applied where needed)."""
        s = self.simplices.copy()
        neg = self.orientation < 0
        if self.dimension == 1:
            s[neg] = s[neg][:, ::-1]
        else:
            s[neg] = s[neg][:, [0, 2, 1]]
        return s

    def _faces(self):
        """Oriented codimension-1 faces with their induced signs."""
        out = []
        for simplex in self.ordered():
            for i in range(len(simplex)):
                face = tuple(np.delete(simplex, i))
                out.append((face, (-1) ** i))
        return out

    def _check_consistent(self):
        count = {}
        for face, sign in self._faces():
            key = frozenset(face)
            count.setdefault(key, []).append(_canonical_sign(face, sign))
        for key, signs in count.items():
            if len(signs) > 2 or (len(signs) == 2 and sum(signs) != 0):
                raise ValueError("inconsistent orientation across a shared face")

    def boundary(self):
        """Faces used by exactly one simplex: list of ``(vertex tuple, sign)``.

        In dimension 2 faces are reordered so the sign is ``+1``; in dimension
        1 the sign is ``+1`` at the right end and ``-1`` at the left end.
        """
        groups = {}
        for face, sign in self._faces():
            groups.setdefault(frozenset(face), []).append((face, sign))
        out = []
        for items in groups.values():
            if len(items) == 1:
                face, sign = items[0]
                if len(face) == 2 and sign < 0:
                    face, sign = face[::-1], 1
                out.append((tuple(int(i) for i in face), int(sign)))
        return sorted(out)

    def reversed(self):
        """Same simplices with the opposite orientation."""
        return Triangulation(self.vertices, self.simplices, -self.orientation)

    def volume(self):
        return float(np.sum(np.abs(_signed_volume(self.vertices[self.simplices]))))

    def max_diameter(self):
        pts = self.vertices[self.simplices]
        return float(max(np.max(np.linalg.norm(pts[:, i] - pts[:, j], axis=1))
                         for i, j in itertools.combinations(range(pts.shape[1]), 2)))

    # serialization
    def to_json(self):
        return {
            "dimension": self.dimension,
            "vertices": self.vertices.tolist(),
            "simplices": self.simplices.tolist(),
            "orientations": self.orientation.tolist(),
            "boundary": [[list(f), s] for f, s in self.boundary()],
        }

    @classmethod
    def from_json(cls, data):
        tri = cls(np.array(data["vertices"], float), np.array(data["simplices"], int),
                  np.array(data["orientations"], int))
        if tri.dimension != data["dimension"]:
            raise ValueError("dimension field disagrees with vertices")
        if "boundary" in data:
            given = sorted((tuple(f), s) for f, s in data["boundary"])
            if given != tri.boundary():
                raise ValueError("boundary list disagrees with the simplices")
        return tri

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_json()) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path):
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def _canonical_sign(face, sign):
    """Sign of ``face`` relative to its sorted vertex order."""
    order = np.argsort(face)
    return sign * (-1) ** _parity(order)


def oriented(vertices, simplices):
    """Build a Triangulation, computing orientation flags from the embedding."""
    v = np.asarray(vertices, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    s = np.asarray(simplices, dtype=np.int64)
    return Triangulation(v, s, np.sign(_signed_volume(v[s])).astype(np.int64))


def interval(a=0.0, b=1.0, cuts=()):
    """``[a, b]`` split at the given interior points."""
    x = np.concatenate([[a], np.sort(np.asarray(cuts, float)), [b]])
    return oriented(x, np.stack([np.arange(len(x) - 1), np.arange(1, len(x))], axis=1))


def uniform_interval(a=0.0, b=1.0, pieces=1):
    return interval(a, b, np.linspace(a, b, pieces + 1)[1:-1])


def random_interval(rng, a=0.0, b=1.0, cuts=5):
    return interval(a, b, rng.uniform(a, b, cuts))


def unit_square():
    v = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float)
    return oriented(v, [[0, 1, 2], [0, 2, 3]])


def random_disk(rng, radius=1.0, boundary_points=16, interior_points=20):
    """Delaunay triangulation of random points in a disk, with boundary
    vertices exactly on the circle and every interior point strictly inside
    the polygon they span."""
    if boundary_points < 3:
        raise ValueError("need at least 3 boundary points")
    while True:
        ang = np.sort(rng.uniform(0, 2 * np.pi, boundary_points))
        gap = np.max(np.diff(np.r_[ang, ang[0] + 2 * np.pi]))
        if gap < 0.9 * np.pi:
            break
    rim = radius * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    # keep interior points inside the rim polygon so the hull is the rim
    inner_r = 0.9 * radius * np.cos(gap / 2)
    r = inner_r * np.sqrt(rng.uniform(0, 1, interior_points))
    th = rng.uniform(0, 2 * np.pi, interior_points)
    inner = np.stack([r * np.cos(th), r * np.sin(th)], axis=1)
    pts = np.vstack([rim, inner])
    simp = Delaunay(pts).simplices
    vol = _signed_volume(pts[simp])
    keep = np.abs(vol) > 1e-10
    return oriented(pts, simp[keep])


def barycentric_subdivide(tri):
    """Standard barycentric subdivision: each n-simplex becomes ``(n+1)!``
    simplices through its barycenter; faces share their barycenters."""
    verts = [tuple(v) for v in tri.vertices]
    index = {frozenset([i]): i for i in range(len(verts))}
    coords = list(tri.vertices)
    simplices = []

    def bary(ids):
        key = frozenset(int(i) for i in ids)
        if key not in index:
            index[key] = len(coords)
            coords.append(tri.vertices[list(key)].mean(axis=0))
        return index[key]

    for simplex in tri.ordered():
        for perm in itertools.permutations(range(len(simplex))):
            chain = [bary(simplex[list(perm[:k + 1])]) for k in range(len(simplex))]
            simplices.append(chain)
    return oriented(np.array(coords), np.array(simplices))


# sums ------------------------------------------------------------------------------

def _fsum_complex(values):
    values = np.asarray(values)
    return complex(math.fsum(values.real.tolist()), math.fsum(np.imag(values).tolist()))


def riemann_sum(omega, tri):
    """Sum of ``omega`` over the positively ordered simplices."""
    if omega.arity != tri.dimension + 1:
        raise ValueError(f"cochain arity {omega.arity} does not match dimension {tri.dimension}")
    s = tri.ordered()
    return _fsum_complex(omega(*[tri.vertices[s[:, i]] for i in range(s.shape[1])]))


def boundary_sum(omega, tri):
    """Sum of a boundary cochain (arity = dimension) over the induced boundary."""
    if omega.arity != tri.dimension:
        raise ValueError("boundary cochain arity must equal the dimension")
    faces = tri.boundary()
    if not faces:
        return 0j
    idx = np.array([f for f, _ in faces])
    sign = np.array([s for _, s in faces])
    vals = omega(*[tri.vertices[idx[:, i]] for i in range(idx.shape[1])])
    return _fsum_complex(sign * vals)


def converge(omega, tri, levels, exact=None):
    """Riemann sums over ``levels + 1`` successive barycentric subdivisions.

    Returns a list of ``(level, simplex_count, value, error)``; ``error`` is
    ``|value - exact|`` or ``nan`` when no exact value is given.
    """
    limit = 6 if tri.dimension == 2 else 16
    if levels > limit:
        raise ValueError(f"at most {limit} levels in dimension {tri.dimension}")
    rows = []
    for level in range(levels + 1):
        val = riemann_sum(omega, tri)
        err = abs(val - exact) if exact is not None else float("nan")
        rows.append((level, len(tri.simplices), val, err))
        if level < levels:
            tri = barycentric_subdivide(tri)
    return rows


# closed pairs ----------------------------------------------------------------------

@dataclass(frozen=True)
class ClosedPair:
    interior: DiagonalCochain
    boundary: DiagonalCochain

    def check(self, interior_points, boundary_points, tol=1e-10):
        """Check both alternating-sum conditions on supplied tuples.

        ``interior_points``: list of ``arity + 1`` arrays ``(k, d)``;
        ``boundary_points``: list of ``arity`` arrays on the boundary.
        """
        d1 = coboundary(self.interior)(*interior_points)
        if np.max(np.abs(d1)) > tol:
            raise ValueError("interior cochain is not closed")
        d2 = self.interior(*boundary_points) - coboundary(self.boundary)(*boundary_points)
        if np.max(np.abs(d2)) > tol:
            raise ValueError("interior and boundary cochains do not match on the boundary")
        return self


def stokes_pair(pair, tri, reference):
    """``(lhs, rhs)``: lhs is the Riemann-sum difference on ``tri``; rhs is
    the supplied reference ``int_M VE(interior) - int_dM VE(boundary)``."""
    lhs = riemann_sum(pair.interior, tri) - boundary_sum(pair.boundary, tri)
    return lhs, complex(reference)


def point_cochain_zero():
    """The zero boundary cochain on the endpoints of an interval."""
    return zero_cochain(1)


def disk_circulation_pair(form, radius=1.0, rim_tol=1e-12):
    """Closed pair ``(delta l, 0)`` on a disk from a 1-form ``form``.

    ``l(x, y)`` integrates ``form`` along the short circular arc when both
    points lie on the rim and along the straight segment otherwise.  Arcs
    are additive, so ``delta l`` vanishes on triples of nearby rim points and
    the pair with the zero boundary cochain is closed; its interior Riemann
    sum equals the circulation around the circle for every triangulation.
    """
    seg = segment_integral(form)
    t_nodes = 0.5 * (_GL_X + 1)
    t_w = 0.5 * _GL_W

    def arc(x, y):
        a0 = np.arctan2(x[:, 1], x[:, 0])
        da = np.angle(np.exp(1j * (np.arctan2(y[:, 1], y[:, 0]) - a0)))
        total = 0.0
        for tk, wk in zip(t_nodes, t_w):
            th = a0 + tk * da
            pt = radius * np.stack([np.cos(th), np.sin(th)], axis=1)
            tangent = radius * np.stack([-np.sin(th), np.cos(th)], axis=1) * da[:, None]
            total = total + wk * np.sum(form(pt) * tangent, axis=1)
        return total

    def ell(x, y):
        on_rim = (np.abs(np.hypot(x[:, 0], x[:, 1]) - radius) < rim_tol) & \
                 (np.abs(np.hypot(y[:, 0], y[:, 1]) - radius) < rim_tol)
        out = np.asarray(seg(x, y), dtype=complex)
        if np.any(on_rim):
            out[on_rim] = arc(x[on_rim], y[on_rim])
        return out

    line = DiagonalCochain(2, ell, "arc-or-segment")
    return ClosedPair(coboundary(line), zero_cochain(2)), line
