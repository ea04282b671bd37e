"""States on the truncated phase plane: linearly polarized sections, the
path-integral pairing and its negative-norm directions.

The path-integral pairing of two sections is

    <Psi1 | Psi0> = (2 pi hbar)^-2  sum_w sum_z  W(w) W(z) conj(Psi1(w)) Psi0(z) exp(i sigma(z, w) / 2 hbar)

with ``sigma(z, w) = z_p w_q - z_q w_p``.  On positively polarized states it
is a fixed multiple ``1 / (pi hbar)`` of the L2 pairing.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import hermite as _herm
from scipy.special import erfc

from .geometry import check_hbar
from .grid import GridSection, GridSpec, _check_compatible, twisted_transform

DET_TOL = 1e-12


@dataclass(frozen=True)
class LinearPolarization:
    """Linear polarization with leaf coordinate ``a p + b q`` and conjugate
    coordinate ``c p + d q``; ``a d - b c = 1``.

    Real entries give a real (Lagrangian) foliation.  Complex entries give
    Kähler-type polarizations whose states decay in every direction, which is
    what a finite grid needs.
    """

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for name in "abcd":
            v = complex(getattr(self, name))
            if not np.isfinite(v):
                raise ValueError(f"non-finite polarization entry {name}")
            object.__setattr__(self, name, v)
        if abs(self.a * self.d - self.b * self.c - 1) > DET_TOL:
            raise ValueError("polarization must satisfy a d - b c = 1")

    @classmethod
    def vertical(cls):
        """Leaves ``p = const``; states depend on ``p`` up to the gauge phase."""
        return cls(1, 0, 0, 1)

    @classmethod
    def horizontal(cls):
        return cls(0, 1, -1, 0)

    @classmethod
    def kahler(cls, squeeze=1.0):
        """Holomorphic polarization in ``p + i squeeze q``."""
        return cls(1, 1j * squeeze, 0, 1)

    @classmethod
    def random(cls, rng, spread=0.3):
        """``kahler() @ S`` with ``S`` a random element of SL(2, R) near 1."""
        m = np.eye(2) + spread * rng.standard_normal((2, 2))
        det = np.linalg.det(m)
        if det < 0:
            m[:, 0] *= -1
            det = -det
        m /= np.sqrt(det)
        return cls.from_matrix(np.array([[1, 1j], [0, 1]]) @ m)

    @property
    def matrix(self):
        return np.array([[self.a, self.b], [self.c, self.d]])

    @classmethod
    def from_matrix(cls, m):
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @property
    def is_real(self):
        return all(abs(complex(v).imag) == 0 for v in (self.a, self.b, self.c, self.d))

    def leaf(self, p, q):
        return self.a * p + self.b * q

    def conjugate(self, p, q):
        return self.c * p + self.d * q


def gaussian_profile(width):
    """``exp(-w^2 / (2 width^2))``."""
    return hermite_profile(0, width)


def hermite_profile(n, width):
    """Hermite function ``H_n(w / width) exp(-w^2 / (2 width^2))`` (unnormalized)."""
    if n < 0 or int(n) != n:
        raise ValueError("Hermite index must be a non-negative integer")

    coef = np.zeros(int(n) + 1)
    coef[-1] = 1.0

    def profile(w):
        y = np.asarray(w) / width
        return _herm.hermval(y, coef) * np.exp(-0.5 * y * y)

    return profile


def plateau_window(half_length, edge):
    """Smooth indicator of ``|x| <= half_length`` with erfc edges of width ``edge``."""

    def window(x):
        return 0.5 * (erfc((x - half_length) / edge) - erfc((x + half_length) / edge))

    return window


def make_polarized(pol, profile, spec, hbar=1.0, window=None, check=True):
    """Sample ``exp(i/2hbar (a p + b q)(c p + d q)) profile(a p + b q)``.

    Parameters
    ----------
    pol : LinearPolarization
    profile : callable
        One-variable profile, evaluated at complex arguments for complex
        polarizations.
    window : callable, optional
        Multiplies by ``window(c p + d q)``; only meaningful for real
        polarizations, whose states are otherwise constant along the leaves
        and cannot decay on a finite grid.
    check : bool
        Enforce the boundary-decay requirement.
    """
    hbar = check_hbar(hbar)
    P, Q = spec.mesh()
    x = pol.leaf(P, Q)
    y = pol.conjugate(P, Q)
    vals = np.exp(0.5j / hbar * x * y) * profile(x)
    if window is not None:
        if not pol.is_real:
            raise ValueError("leaf windows apply to real polarizations only")
        vals = vals * window(y.real)
    sec = GridSection(spec, vals, hbar)
    if check:
        sec.check_decay()
    return sec


def zero_section(spec, hbar=1.0):
    return GridSection(spec, np.zeros((spec.n, spec.n)), hbar)


def from_function(func, spec, hbar=1.0, check=True):
    """Section sampled from ``func(P, Q)``."""
    P, Q = spec.mesh()
    sec = GridSection(spec, func(P, Q), hbar)
    if check:
        sec.check_decay()
    return sec


def l2_inner(psi1, psi0):
    """Quadrature of ``conj(psi1) psi0`` with the grid weights."""
    _check_compatible(psi1, psi0)
    return complex(np.sum(psi1.spec.weights * np.conj(psi1.values) * psi0.values))


def pairing_transform(psi):
    """``Phi(w) = sum_z W(z) psi(z) exp(i sigma(z, w) / 2 hbar)`` on the grid."""
    spec = psi.spec
    return twisted_transform(psi.values, spec.axis, spec.weights, 0.5 / psi.hbar, spec.axis)


def pathintegral_inner(psi1, psi0):
    """Path-integral pairing of two sections (antilinear in ``psi1``)."""
    _check_compatible(psi1, psi0)
    phi = pairing_transform(psi0)
    total = np.sum(psi1.spec.weights * np.conj(psi1.values) * phi)
    return complex(total / (2 * np.pi * psi0.hbar) ** 2)


def pairing_constant(hbar=1.0):
    """Ratio of the path-integral pairing to the L2 pairing on positively
    polarized states."""
    return 1.0 / (np.pi * check_hbar(hbar))


def calibrate_pairing_constant(spec, hbar=1.0, pol=None):
    """Measure the pairing constant on the Gaussian ground state of ``pol``
    (default: the standard Kähler polarization)."""
    pol = LinearPolarization.kahler() if pol is None else pol
    vac = make_polarized(pol, gaussian_profile(np.sqrt(2 * hbar)), spec, hbar)
    return (pathintegral_inner(vac, vac) / l2_inner(vac, vac)).real


def gram_form(spec, hbar=1.0):
    """Hermitian matrix of the pairing in the weight-orthonormal point basis.

    Entry ``[w, z]`` (flattened row-major) is
    ``sqrt(W_w W_z) exp(i sigma(z, w) / 2 hbar) / (2 pi hbar)^2``; its
    eigenvalues are Rayleigh quotients pairing / L2.  Memory is ``O(N^4)``.
    """
    hbar = check_hbar(hbar)
    if spec.n > 48:
        raise ValueError("dense Gram form is limited to N <= 48")
    P, Q = spec.mesh()
    p, q = P.ravel(), Q.ravel()
    s = np.sqrt(spec.weights.ravel())
    phase = np.outer(q, p) - np.outer(p, q)   # sigma(z, w) indexed [w, z]
    g = np.exp(0.5j / hbar * phase) / (2 * np.pi * hbar) ** 2
    g = s[:, None] * g * s[None, :]
    return 0.5 * (g + g.conj().T)


def negative_norm_witness(spec, hbar=1.0, threshold=-0.1):
    """A decaying section with negative self-pairing.

    Diagonalizes the Gram form, takes the eigenvectors with Rayleigh quotient
    below ``threshold`` and, within that subspace, the combination with the
    least weight on the grid boundary.

    Returns
    -------
    (GridSection, float, float)
        The witness, its self-pairing divided by its squared L2 norm, and the
        smallest eigenvalue of the Gram form.
    """
    hbar = check_hbar(hbar)
    evals, vecs = np.linalg.eigh(gram_form(spec, hbar))
    neg = vecs[:, evals < threshold]
    if neg.shape[1] == 0:
        raise RuntimeError("no eigenvalue below threshold; grid too coarse")
    n = spec.n
    edge = np.zeros((n, n), bool)
    edge[[0, -1], :] = edge[:, [0, -1]] = True
    b = neg[edge.ravel()]
    _, sub = np.linalg.eigh(b.conj().T @ b)
    coef = neg @ sub[:, 0]
    vals = (coef / np.sqrt(spec.weights.ravel())).reshape(n, n)
    sec = GridSection(spec, vals, hbar).normalized().check_decay()
    value = pathintegral_inner(sec, sec)
    if abs(value.imag) > 1e-6 * abs(value):
        raise RuntimeError("self-pairing is not real; discretization too coarse")
    return sec, value.real / l2_inner(sec, sec).real, float(evals[0])


def random_polarized_state(spec, rng, hbar=1.0, max_index=2, spread=0.15, attempts=50):
    """A normalized Hermite-profile state of a random complex polarization
    near the standard Kähler one, redrawn until it decays on ``spec``.

    Returns ``(section, polarization, hermite_index)``.
    """
    for _ in range(attempts):
        pol = LinearPolarization.random(rng, spread)
        n = int(rng.integers(0, max_index + 1))
        sec = make_polarized(pol, hermite_profile(n, np.sqrt(2 * hbar)), spec, hbar, check=False)
        if sec.boundary_ratio() <= 1e-8:
            return sec.normalized(), pol, n
    raise RuntimeError("could not draw a decaying polarized state; enlarge the grid")


def orthonormal_polarized_basis(pol, size, spec, hbar=1.0, width=None):
    """Gram-Schmidt (in L2) of the first ``size`` Hermite-profile states of ``pol``."""
    width = np.sqrt(2 * hbar) if width is None else width
    basis = []
    for k in range(size):
        v = make_polarized(pol, hermite_profile(k, width), spec, hbar)
        for e in basis:
            v = v - e * l2_inner(e, v)
        basis.append(v.normalized())
    return basis


def pairing_matrix(rows, cols):
    """``M[i, j] = pathintegral_inner(rows[i], cols[j])``; each column's
    transform is computed once."""
    out = np.empty((len(rows), len(cols)), dtype=complex)
    for j, c in enumerate(cols):
        phi = pairing_transform(c)
        for i, r in enumerate(rows):
            _check_compatible(r, c)
            out[i, j] = np.sum(r.spec.weights * np.conj(r.values) * phi) / (2 * np.pi * c.hbar) ** 2
    return out
