"""Phase-plane primitives on T*R with symplectic form dp ^ dq.

Points are ``(p, q)`` pairs.  Every function here broadcasts over numpy
arrays whose last axis has length 2, so a single call can evaluate a whole
grid of triangles.

The prequantum connection is fixed in the symmetric gauge
``theta = (p dq - q dp) / 2`` with ``d theta = dp ^ dq``; parallel transport
along the straight segment from ``u0`` to ``u1`` multiplies by
``exp(i * pairing(u0, u1) / (2 hbar))``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Sign relating the transport around a triangle to its signed area:
#: transport(u, v) * transport(v, z) * transport(z, u) == exp(i * SIGN * area(u, v, z) / hbar).
HOLONOMY_SIGN = 1


@dataclass(frozen=True)
class PhasePoint:
    """A point of the phase plane."""

    p: float
    q: float

    def __post_init__(self):
        if not (np.isfinite(self.p) and np.isfinite(self.q)):
            raise ValueError(f"non-finite phase point ({self.p}, {self.q})")

    def __array__(self, dtype=None, copy=None):
        return np.array([self.p, self.q], dtype=dtype)

    def __iter__(self):
        yield self.p
        yield self.q


def check_hbar(hbar):
    hbar = float(hbar)
    if not (hbar > 0 and np.isfinite(hbar)):
        raise ValueError(f"hbar must be a positive finite number, got {hbar}")
    return hbar


def _pq(u):
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != 2:
        raise ValueError("phase points need a trailing axis of length 2")
    return u[..., 0], u[..., 1]


def symplectic_pairing(u0, u1):
    """``p0 * q1 - q0 * p1``."""
    p0, q0 = _pq(u0)
    p1, q1 = _pq(u1)
    return p0 * q1 - q0 * p1


def triangle_area(u, v, z):
    """Signed area of the triangle ``(u, v, z)``; positive when counter-clockwise
    in the ``(p, q)`` plane."""
    up, uq = _pq(u)
    vp, vq = _pq(v)
    zp, zq = _pq(z)
    return 0.5 * ((vp - up) * (zq - uq) - (vq - uq) * (zp - up))


def transport_phase(u0, u1, hbar=1.0):
    """Parallel transport of ``1`` from ``u0`` to ``u1`` along the segment."""
    hbar = check_hbar(hbar)
    return np.exp(0.5j * symplectic_pairing(u0, u1) / hbar)
