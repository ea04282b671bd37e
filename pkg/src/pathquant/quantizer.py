"""The quantization map ``f -> Q_f`` on sampled sections.

``quantize_full`` evaluates the triangle-area double integral

    Q_f Psi(u) = c  sum_v sum_z  f(s v) Psi(z) exp(i Omega(z, v, u) / hbar)

with the middle vertex ``v`` integrated over the grid lattice extended by
half a grid on every side.  ``c = NORMALIZATION / (2 pi hbar)^2`` and
``s = INSERTION_SCALE`` are fixed by requiring ``Q_1 = Id`` and
``Q_q = q-hat`` on Gaussian states; ``calibrate_constants`` re-measures both.

Also here: the single-integral form valid on positively polarized states,
the kernel (section over M x M) representation, and two oracles, the
Kostant-Souriau operator and Weyl-ordered operators on one-variable profiles.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .grid import GridSection, GridSpec, spectral_derivative, twisted_convolution, twisted_transform
from .observables import MAX_DEGREE, Observable

NORMALIZATION = 0.25
INSERTION_SCALE = 0.5

#: Q_q Q_p - Q_p Q_q = i hbar * COMMUTATOR_SIGN
COMMUTATOR_SIGN = 1

#: Largest transport-phase increment per grid cell (radians) still resolved
#: to 1e-6 accuracy; errors grow quickly past roughly 3.
MAX_PHASE_STEP = 2.5


class GridResolutionError(ValueError):
    """The grid spacing cannot resolve the transport phase."""


def check_resolution(spec, hbar):
    """Largest phase step of the transport factor between neighbouring
    lattice points must stay below ``MAX_PHASE_STEP``."""
    step = spec.spacing * np.sqrt(2) * spec.half_width / (2 * hbar)
    if step > MAX_PHASE_STEP:
        raise GridResolutionError(
            f"phase step {step:.2f} rad per cell; need more points or a smaller box")


def _as_callable(f):
    return f if callable(f) else Observable.constant(f)


def _offsets(spec, extra):
    t = spec.n - 1 + extra
    return t, np.arange(-t, t + 1) * spec.spacing


def _extended(spec, extra):
    v = spec.lattice(extra)
    w = np.full(v.size, spec.spacing)
    w[0] = w[-1] = 0.5 * spec.spacing
    return v, w


def quantize_full(f, psi, normalization=NORMALIZATION, scale=INSERTION_SCALE, extra=None):
    """Apply ``Q_f`` to a section by the full double integral.

    Parameters
    ----------
    f : Observable or callable ``f(p, q)``
    psi : GridSection
    extra : int, optional
        Lattice points added on every side for the middle-vertex integral
        (default ``n // 2``).
    """
    f = _as_callable(f)
    spec, hbar = psi.spec, psi.hbar
    check_resolution(spec, hbar)
    extra = spec.n // 2 if extra is None else int(extra)
    t, tgt = _offsets(spec, extra)
    phi = twisted_transform(psi.values, spec.axis, spec.weights, -0.5 / hbar, tgt)
    v, wv = _extended(spec, extra)
    vp, vq = np.meshgrid(v, v, indexing="ij")
    amp = f(scale * vp, scale * vq)
    out = twisted_convolution(amp, spec.axis, v, wv, phi, t, 0.5 / hbar)
    return psi.with_values(normalization / (2 * np.pi * hbar) ** 2 * out)


def quantize_polarized(f, psi, normalization=NORMALIZATION, scale=INSERTION_SCALE):
    """Single-integral form valid on positively polarized states:

        Q_f Psi(u) = (4 c pi hbar)  sum_w  f(s (u + w)) Psi(w) exp(i sigma(w, u) / 2 hbar)

    where ``c`` is the full-form constant, i.e. ``1 / (4 pi hbar)`` with the
    default normalization.
    """
    f = _as_callable(f)
    spec, hbar = psi.spec, psi.hbar
    check_resolution(spec, hbar)
    x = spec.axis
    pref = normalization / (np.pi * hbar)
    wpsi = (spec.weights * psi.values)[None, :, :]           # [., wp, wq]
    wp = x[None, :, None]
    wq = x[None, None, :]
    uq = x[:, None, None]
    out = np.empty((spec.n, spec.n), dtype=complex)
    for i, up in enumerate(x):
        amp = f(scale * (up + wp), scale * (uq + wq))        # [j, wp, wq]
        phase = np.exp(0.5j / hbar * (wp * uq - wq * up))
        out[i] = np.sum(amp * phase * wpsi, axis=(1, 2))
    return psi.with_values(pref * out)


def preserves_polarization(f, pol):
    """True when the Hamiltonian flow of ``f`` maps leaves of ``pol`` to leaves.

    For a real polarization this means ``f`` is affine along the leaves.  For
    complex polarizations only affine ``f`` are accepted (a sufficient
    condition).
    """
    if not isinstance(f, Observable) or not f.is_polynomial:
        return False
    if not pol.is_real:
        return f.degree <= 1
    import sympy as sp
    from .observables import P_SYM, Q_SYM

    t = sp.Symbol("t")
    dp, dq = pol.b.real, -pol.a.real                  # leaf direction: d(a p + b q) = 0
    line = f.to_sympy().subs({P_SYM: P_SYM + t * dp, Q_SYM: Q_SYM + t * dq}, simultaneous=True)
    return sp.simplify(sp.diff(line, t, 2)) == 0


def ks_prequantize(f, psi, polarization=None):
    """Kostant-Souriau operator ``(hbar/i) nabla_{X_f} + f`` in the gauge
    ``theta = (p dq - q dp) / 2``, ``nabla = d - (i/hbar) theta``.

    ``X_f = f_p d/dq - f_q d/dp``.  Derivatives are spectral.  The operator
    only makes sense on polarized states when ``f`` preserves the
    polarization (default: vertical, whose states are functions of ``p``, so
    ``f`` must be affine in ``q``); other observables are rejected.
    """
    from .states import LinearPolarization

    pol = LinearPolarization.vertical() if polarization is None else polarization
    if not preserves_polarization(f, pol):
        raise ValueError("observable does not preserve the polarization")
    spec, hbar = psi.spec, psi.hbar
    P, Q = spec.mesh()
    fv, fp, fq = f.with_gradient(P, Q)
    xp, xq = -fq, fp
    h = spec.spacing
    vals = psi.values
    deriv = xp * spectral_derivative(vals, h, 0) + xq * spectral_derivative(vals, h, 1)
    theta = 0.5 * (P * xq - Q * xp)
    out = (hbar / 1j) * (deriv - (1j / hbar) * theta * vals) + fv * vals
    return psi.with_values(out)


# Weyl oracle ------------------------------------------------------------

def weyl_words(i, j):
    """All distinct orderings of ``i`` copies of ``"p"`` and ``j`` of ``"q"``."""
    return sorted(set(itertools.permutations("p" * i + "q" * j)))


def weyl_oracle(f, profile, x, hbar=1.0, representation="position"):
    """Weyl-ordered operator of a polynomial ``f`` applied to ``profile``.

    ``representation="position"``: ``x`` is ``q``, ``p-hat = (hbar/i) d/dx``.
    ``representation="momentum"``: ``x`` is ``p``, ``q-hat = i hbar d/dx``.
    Each monomial ``p^i q^j`` becomes the average of its distinct words;
    words act right to left.  Derivatives are spectral.
    """
    if not isinstance(f, Observable) or not f.is_polynomial:
        raise ValueError("Weyl oracle covers polynomials only")
    if f.degree > MAX_DEGREE:
        raise ValueError("degree bound exceeded")
    x = np.asarray(x, dtype=float)
    prof = np.asarray(profile, dtype=complex)
    h = x[1] - x[0]
    if representation == "position":
        ops = {"q": lambda g: x * g, "p": lambda g: (hbar / 1j) * spectral_derivative(g, h)}
    elif representation == "momentum":
        ops = {"p": lambda g: x * g, "q": lambda g: 1j * hbar * spectral_derivative(g, h)}
    else:
        raise ValueError(f"unknown representation {representation!r}")
    out = np.zeros_like(prof)
    for i, j, c in f.terms:
        words = weyl_words(i, j)
        acc = np.zeros_like(prof)
        for word in words:
            g = prof
            for letter in reversed(word):
                g = ops[letter](g)
            acc = acc + g
        assert len(words) == comb(i + j, i)
        out = out + c * acc / len(words)
    return out


# kernel representation ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class OperatorKernel:
    """Dense kernel ``K[u1, u0]`` over grid points flattened row-major
    (``index = i_p * n + j_q``); ``(K Psi)(u1) = sum_u0 K[u1, u0] W(u0) Psi(u0)``."""

    spec: GridSpec
    values: np.ndarray = field(repr=False)
    hbar: float = 1.0

    def __post_init__(self):
        n2 = self.spec.n ** 2
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (n2, n2):
            raise ValueError("kernel shape does not match grid")
        if not np.all(np.isfinite(vals)):
            raise ValueError("kernel has non-finite entries")
        object.__setattr__(self, "values", vals)

    def apply(self, psi):
        if psi.spec != self.spec or psi.hbar != self.hbar:
            raise ValueError("section and kernel live on different grids")
        vec = (psi.spec.weights * psi.values).ravel()
        return psi.with_values((self.values @ vec).reshape(self.spec.n, self.spec.n))

    def compose(self, other):
        """Kernel of ``self`` after ``other``."""
        w = self.spec.weights.ravel()
        return OperatorKernel(self.spec, (self.values * w[None, :]) @ other.values, self.hbar)


def kernel_of(f, spec, hbar=1.0, normalization=NORMALIZATION, scale=INSERTION_SCALE, extra=None):
    """Kernel of ``Q_f``:
    ``K[u, z] = c exp(i sigma(u, z) / 2 hbar) fhat(z - u)`` with
    ``fhat(w) = sum_v f(s v) exp(i sigma(w, v) / 2 hbar)``.

    Memory is ``O(n^4)``.
    """
    f = _as_callable(f)
    check_resolution(spec, hbar)
    if spec.n > 64:
        raise ValueError("dense kernels are limited to n <= 64")
    extra = spec.n // 2 if extra is None else int(extra)
    v, wv = _extended(spec, extra)
    vp, vq = np.meshgrid(v, v, indexing="ij")
    off = np.arange(-(spec.n - 1), spec.n) * spec.spacing
    # twisted_transform pairs sigma(v, w); fhat needs sigma(w, v)
    fhat = twisted_transform(f(scale * vp, scale * vq), v, np.outer(wv, wv), -0.5 / hbar, off)
    n = spec.n
    x = spec.axis
    idx = np.arange(n)
    d = idx[None, :] - idx[:, None] + n - 1                  # [u-index, z-index] -> offset index
    blk = fhat[d[:, None, :, None], d[None, :, None, :]]      # [ui, uj, zi, zj]
    P, Q = spec.mesh()
    p, q = P.ravel(), Q.ravel()
    phase = np.exp(0.5j / hbar * (np.outer(p, q) - np.outer(q, p)))
    c = normalization / (2 * np.pi * hbar) ** 2
    return OperatorKernel(spec, c * phase * blk.reshape(n * n, n * n), hbar)


def calibrate_constants(spec=None, hbar=1.0):
    """Measure the normalization and insertion scale on the Gaussian ground state.

    With unit constants, ``<vac|Q_1 vac> / <vac|vac>`` gives the inverse
    normalization.  The insertion scale then follows from comparing
    ``Q_q vac`` with the Kostant-Souriau image of ``q``.
    """
    from .states import LinearPolarization, gaussian_profile, l2_inner, make_polarized

    spec = GridSpec.for_hbar(hbar, n=48, half_width=9.0) if spec is None else spec
    vac = make_polarized(LinearPolarization.kahler(), gaussian_profile(np.sqrt(2 * hbar)), spec, hbar)
    one = quantize_full(1.0, vac, normalization=1.0, scale=1.0)
    norm = (l2_inner(vac, vac) / l2_inner(vac, one)).real
    ref = ks_prequantize(Observable.q(), vac)
    qq = quantize_full(Observable.q(), vac, normalization=norm, scale=1.0)
    scale = (l2_inner(ref, ref) / l2_inner(ref, qq)).real
    return {"normalization": norm, "insertion_scale": scale}
