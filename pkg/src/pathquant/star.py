"""Triangle-area star product on the phase plane and its Moyal-series oracle.

    (f * g)(m) = C  int int  f(u) g(v) exp(i k SIGN Omega(m, u, v) / hbar) du dv

with ``C = 1 / (pi hbar)^2`` and ``k = PHASE_FACTOR``.  Moving ``m`` out of
the phase turns the double integral into

    C  int  f(a) exp(-i k' sigma(a, m)) ghat(a - m) da,
    ghat(w) = int g(b) exp(i k' sigma(w, b)) db,     k' = k SIGN / (2 hbar)

so the transform of ``g`` is taken once and only the neighbourhood of ``m``
where ``ghat`` is non-negligible needs sampling.
"""
from __future__ import annotations

import numpy as np
import sympy as sp

from .geometry import check_hbar
from .grid import twisted_convolution, twisted_transform
from .observables import P_SYM, Q_SYM, Observable

#: Multiplier of the triangle area in the phase.
PHASE_FACTOR = 4
#: Orientation of the triangle area in the phase.
PHASE_SIGN = -1
#: Regularization widths for polynomial inputs and the matching Richardson weights.
RICHARDSON_EPS = (0.1, 0.05, 0.025)
RICHARDSON_WEIGHTS = (1 / 3, -2.0, 8 / 3)

#: star(q, p) - star(p, q) = i hbar * COMMUTATOR_SIGN
COMMUTATOR_SIGN = 1


def star_constant(hbar=1.0):
    return 1.0 / (np.pi * check_hbar(hbar)) ** 2


def _regularized(f, eps):
    """``f`` times ``exp(-eps |u|^2)`` when it has no envelope."""
    if f.envelope is not None:
        return f
    return Observable(f.terms, 1.0 / np.sqrt(2 * eps))


def _reach(f):
    """Radius outside which ``|f|`` is negligible (relative 1e-16)."""
    return f.envelope * (np.sqrt(2 * 37.0) + 1.5 * f.degree)


def _trapezoid_axis(lo, hi, step):
    n = max(int(np.ceil((hi - lo) / step)), 8) + 1
    x = np.linspace(lo, hi, n)
    w = np.full(n, x[1] - x[0])
    w[0] = w[-1] = 0.5 * w[0]
    return x, w


def _star_enveloped(f, g, points, hbar):
    k = PHASE_SIGN * PHASE_FACTOR / (2 * hbar)
    # ghat width in w is 1 / (|k| s_g); keep ~12 widths plus polynomial slack
    rw = (12.0 + 2 * g.degree) / (abs(k) * g.envelope)
    rb = _reach(g)
    b, wb = _trapezoid_axis(-rb, rb, min(g.envelope / 4, np.pi / (abs(k) * rw) / 4))
    gb = g(*np.meshgrid(b, b, indexing="ij"))
    out = np.empty(len(points), dtype=complex)
    for n, (mp, mq) in enumerate(points):
        rm = np.hypot(mp, mq)
        step = min(f.envelope / 4, 1.0 / (abs(k) * g.envelope) / 3,
                   np.pi / (abs(k) * max(rm, 1e-12)) / 6)
        ap, wap = _trapezoid_axis(mp - rw, mp + rw, step)
        aq, waq = _trapezoid_axis(mq - rw, mq + rw, step)
        ghat = twisted_transform(gb, b, np.outer(wb, wb), -k, ap - mp, aq - mq)
        AP, AQ = np.meshgrid(ap, aq, indexing="ij")
        phase = np.exp(-1j * k * (AP * mq - AQ * mp))
        out[n] = np.sum(np.outer(wap, waq) * f(AP, AQ) * phase * ghat)
    return star_constant(hbar) * out


def star(f, g, points, hbar=1.0):
    """Values of ``f * g`` at ``points`` (array of ``(p, q)`` rows).

    Inputs without an envelope are regularized by ``exp(-eps |u - m|^2)``,
    centred at each evaluation point ``m`` (the product commutes with
    translations), and the result is Richardson-extrapolated to ``eps = 0``
    over ``RICHARDSON_EPS``.
    """
    hbar = check_hbar(hbar)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    for h in (f, g):
        if not isinstance(h, Observable):
            raise TypeError("star expects Observable inputs")
        if h.envelope is None and h.degree > 2:
            raise ValueError("regularized evaluation covers polynomials of degree <= 2")
    if f.envelope is not None and g.envelope is not None:
        return _star_enveloped(f, g, points, hbar)
    if f.envelope is not None or g.envelope is not None:
        vals = [_star_enveloped(_regularized(f, e), _regularized(g, e), points, hbar)
                for e in RICHARDSON_EPS]
        return sum(w * v for w, v in zip(RICHARDSON_WEIGHTS, vals))
    out = np.empty(len(points), dtype=complex)
    origin = np.zeros((1, 2))
    for n, (mp, mq) in enumerate(points):
        fs, gs = f.shifted(mp, mq), g.shifted(mp, mq)
        vals = [_star_enveloped(_regularized(fs, e), _regularized(gs, e), origin, hbar)[0]
                for e in RICHARDSON_EPS]
        out[n] = sum(w * v for w, v in zip(RICHARDSON_WEIGHTS, vals))
    return out


def star_grid(f_values, g_values, spec, hbar=1.0):
    """Star product of two functions sampled on ``spec``, returned on the same grid.

    Uses the same twisted-convolution kernel as the quantizer; the transform
    of ``g`` is sampled at all lattice offsets.
    """
    hbar = check_hbar(hbar)
    k = PHASE_SIGN * PHASE_FACTOR / (2 * hbar)
    t = spec.n - 1
    off = np.arange(-t, t + 1) * spec.spacing
    # fhat(w) = ghat(-w)
    ghat_neg = twisted_transform(np.asarray(g_values, complex), spec.axis, spec.weights, k, off)
    out = twisted_convolution(np.asarray(f_values, complex), spec.axis, spec.axis,
                              spec.axis_weights, ghat_neg, t, -k)
    return star_constant(hbar) * out


# closed forms and series -------------------------------------------------

def gaussian_star(alpha, beta, hbar=1.0):
    """Closed form of ``exp(-alpha |u|^2) * exp(-beta |u|^2)`` as a callable."""
    hbar = check_hbar(hbar)
    d = 1.0 + alpha * beta * hbar ** 2

    def value(p, q):
        return np.exp(-(alpha + beta) * (np.asarray(p) ** 2 + np.asarray(q) ** 2) / d) / d

    return value


def moyal_expression(f, g, order, hbar=None):
    """Moyal expansion ``sum_k (i hbar/2)^k / k! P^k(f, g)`` truncated at ``order``,
    with ``P(f, g) = f_q g_p - f_p g_q``; exact once ``order`` reaches the
    combined degree."""
    h = sp.Symbol("hbar", positive=True) if hbar is None else sp.nsimplify(hbar)
    fe = f.to_sympy() if isinstance(f, Observable) else sp.sympify(f)
    ge = g.to_sympy() if isinstance(g, Observable) else sp.sympify(g)
    total = sp.Integer(0)
    for k in range(order + 1):
        term = sp.Integer(0)
        for j in range(k + 1):
            df = sp.diff(fe, Q_SYM, k - j, P_SYM, j) if k else fe
            dg = sp.diff(ge, P_SYM, k - j, Q_SYM, j) if k else ge
            term += sp.binomial(k, j) * (-1) ** j * df * dg
        total += (sp.I * h / 2) ** k / sp.factorial(k) * term
    return sp.expand(total)


def moyal_series_oracle(f, g, order, points, hbar=1.0):
    """Numerical values of the truncated Moyal series at ``points``."""
    if not (f.is_polynomial and g.is_polynomial):
        raise ValueError("Moyal series oracle needs polynomial inputs")
    expr = moyal_expression(f, g, order, hbar)
    fn = sp.lambdify((P_SYM, Q_SYM), expr, "numpy")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return np.broadcast_to(np.asarray(fn(pts[:, 0], pts[:, 1]), dtype=complex), (len(pts),)).copy()


def moyal_product(f, g, hbar=1.0):
    """Exact star product of two polynomials as an Observable."""
    if not (f.is_polynomial and g.is_polynomial):
        raise ValueError("exact Moyal product needs polynomial inputs")
    return Observable.from_sympy(moyal_expression(f, g, f.degree + g.degree, hbar))


def calibrate_star(hbar=1.0, width=1.0, point=(0.4, -0.3)):
    """Measure the normalization from ``f * 1 = f`` on a Gaussian ``f`` and the
    commutator sign from ``q * p - p * q``."""
    f = Observable.constant(1.0, envelope=width)
    one = star(f, Observable.constant(1.0), [point], hbar)[0]
    ratio = (f(*point) / one).real
    comm = (star(Observable.q(), Observable.p(), [point], hbar)
            - star(Observable.p(), Observable.q(), [point], hbar))[0]
    return {"normalization_ratio": float(ratio), "phase_factor": PHASE_FACTOR,
            "commutator_over_i_hbar": float((comm / (1j * hbar)).real)}
