"""Uniform phase-plane grids, sampled sections and the quadrature kernels
shared by the inner product, the quantizer and the grid star product.

Array convention: ``values[i, j]`` is the sample at ``(p_i, q_j)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import check_hbar

DECAY_TOL = 1e-8


@dataclass(frozen=True)
class GridSpec:
    """The square ``[-L, L]^2`` sampled with ``n`` points per axis."""

    half_width: float
    n: int

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")
        if int(self.n) != self.n or self.n < 8:
            raise ValueError("need at least 8 points per axis")

    @classmethod
    def for_hbar(cls, hbar=1.0, n=64, half_width=10.0):
        """Grid whose extent scales like sqrt(hbar); ``half_width`` is the
        value at hbar = 1."""
        return cls(half_width * np.sqrt(check_hbar(hbar)), n)

    @property
    def spacing(self):
        return 2.0 * self.half_width / (self.n - 1)

    @property
    def axis(self):
        return np.linspace(-self.half_width, self.half_width, self.n)

    @property
    def axis_weights(self):
        w = np.full(self.n, self.spacing)
        w[0] = w[-1] = 0.5 * self.spacing
        return w

    @property
    def weights(self):
        w = self.axis_weights
        return np.outer(w, w)

    def mesh(self):
        """``(P, Q)`` coordinate arrays, indexing ``[i_p, j_q]``."""
        return np.meshgrid(self.axis, self.axis, indexing="ij")

    def lattice(self, extra):
        """The grid's lattice extended by ``extra`` points on every side."""
        return self.axis[0] + (np.arange(self.n + 2 * extra) - extra) * self.spacing


@dataclass(frozen=True, eq=False)
class GridSection:
    """Samples of a section of the prequantum line bundle in the symmetric
    trivialization."""

    spec: GridSpec
    values: np.ndarray = field(repr=False)
    hbar: float = 1.0

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        if vals.shape != (self.spec.n, self.spec.n):
            raise ValueError(f"values shape {vals.shape} does not match grid {self.spec.n}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("section has non-finite samples")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "hbar", check_hbar(self.hbar))

    def boundary_ratio(self):
        """Largest boundary sample relative to the largest sample."""
        v = np.abs(self.values)
        peak = v.max()
        if peak == 0:
            return 0.0
        edge = max(v[0].max(), v[-1].max(), v[:, 0].max(), v[:, -1].max())
        return edge / peak

    def check_decay(self, tol=DECAY_TOL):
        r = self.boundary_ratio()
        if r > tol:
            raise ValueError(
                f"section does not decay at the grid boundary (ratio {r:.2e} > {tol:.0e}); "
                "enlarge the grid or narrow the state")
        return self

    def with_values(self, values):
        return GridSection(self.spec, values, self.hbar)

    def __add__(self, other):
        _check_compatible(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        _check_compatible(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar):
        return self.with_values(scalar * self.values)

    __rmul__ = __mul__

    def norm_l2(self):
        return float(np.sqrt(np.sum(self.spec.weights * np.abs(self.values) ** 2)))

    def normalized(self):
        return self * (1.0 / self.norm_l2())


def _check_compatible(a, b):
    if a.spec != b.spec:
        raise ValueError(f"grid mismatch: {a.spec} vs {b.spec}")
    if a.hbar != b.hbar:
        raise ValueError(f"hbar mismatch: {a.hbar} vs {b.hbar}")


def twisted_transform(values, axis, weights, phase, targets_p, targets_q=None):
    """``F(w) = sum_z W(z) g(z) exp(i * phase * (z_p w_q - z_q w_p))``.

    ``values`` are samples on ``axis x axis``; the result is evaluated on the
    tensor grid ``targets_p x targets_q``.  Both exponentials factor, so the
    sum is two matrix products.
    """
    if targets_q is None:
        targets_q = targets_p
    e_p = np.exp(1j * phase * np.outer(axis, targets_q))   # [z_p, w_q]
    e_q = np.exp(-1j * phase * np.outer(axis, targets_p))  # [z_q, w_p]
    return e_q.T @ (values * weights).T @ e_p


def twisted_convolution(amplitude, axis, ext_axis, ext_weights, fhat, offset, phase):
    """``out(u) = sum_v A(v) exp(i phase (v_p u_q - v_q u_p)) fhat(u - v)``.

    ``amplitude`` lives on ``ext_axis^2`` (the grid lattice extended by
    ``E`` points a side), ``fhat`` on integer lattice offsets with index
    ``(u - v)/h + offset``.  Cost O(n^2 m^2) with m = len(ext_axis).
    """
    n = len(axis)
    m = len(ext_axis)
    extra = (m - n) // 2
    k = np.arange(m)
    j = np.arange(n)
    amp = amplitude * np.outer(ext_weights, ext_weights)
    ph_jk = np.exp(1j * phase * np.outer(axis, ext_axis))          # + v_p u_q
    col = (j[:, None] - k[None, :] + extra) + offset                 # [j, l]
    out = np.empty((n, n), dtype=complex)
    for i in range(n):
        ph_l = np.exp(-1j * phase * axis[i] * ext_axis)              # - v_q u_p
        block = fhat[i - k + extra + offset][:, col]                 # [k, j, l]
        out[i] = np.einsum("kl,l,jk,kjl->j", amp, ph_l, ph_jk, block, optimize=True)
    return out


def spectral_derivative(values, spacing, axis=0, order=1):
    """FFT derivative; exact to round-off for samples that decay at both ends."""
    values = np.asarray(values, dtype=complex)
    n = values.shape[axis]
    k = 2j * np.pi * np.fft.fftfreq(n, spacing)
    shape = [1] * values.ndim
    shape[axis] = n
    k = k.reshape(shape) ** order
    return np.fft.ifft(np.fft.fft(values, axis=axis) * k, axis=axis)
