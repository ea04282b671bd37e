import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from pathquant import quantizer as qz
from pathquant import star as sx
from pathquant.grid import GridSpec
from pathquant.observables import P_SYM, Q_SYM, Observable

HB = 1.0
PTS = np.array([[0.0, 0.0], [0.4, -0.3], [1.2, 0.9], [-1.5, 0.6]])


def gauss(alpha, terms="1"):
    """``terms * exp(-alpha |u|^2)``."""
    return Observable.parse(terms, envelope=1 / np.sqrt(2 * alpha))


def test_unit_element():
    one = Observable.constant()
    for f in (gauss(0.5), gauss(0.3, "p - q**2")):
        assert np.max(np.abs(sx.star(f, one, PTS, HB) - f(*PTS.T))) <= 1e-3
        assert np.max(np.abs(sx.star(one, f, PTS, HB) - f(*PTS.T))) <= 1e-3
    f = Observable.parse("p*q + 2*q")
    assert np.max(np.abs(sx.star(f, one, PTS, HB) - f(*PTS.T))) <= 1e-3


def test_canonical_commutator_sign_matches_quantizer():
    q, p = Observable.q(), Observable.p()
    comm = sx.star(q, p, PTS, HB) - sx.star(p, q, PTS, HB)
    assert np.max(np.abs(comm - 1j * HB * sx.COMMUTATOR_SIGN)) <= 2e-3
    assert sx.COMMUTATOR_SIGN == qz.COMMUTATOR_SIGN


@pytest.mark.parametrize("alpha, beta", [(0.5, 0.5), (0.3, 0.8), (1.0, 0.25)])
def test_gaussian_product_closed_form(alpha, beta):
    exact = sx.gaussian_star(alpha, beta, HB)(*PTS.T)
    assert np.max(np.abs(sx.star(gauss(alpha), gauss(beta), PTS, HB) - exact)) <= 1e-6


def test_grid_product_matches_closed_form_and_pointwise():
    spec = GridSpec(5.0, 64)
    P, Q = spec.mesh()
    out = sx.star_grid(np.exp(-0.5 * (P ** 2 + Q ** 2)), np.exp(-0.3 * (P ** 2 + Q ** 2)), spec, HB)
    assert np.max(np.abs(out - sx.gaussian_star(0.5, 0.3, HB)(P, Q))) <= 1e-7
    f, g = gauss(0.35, "1 + p"), gauss(0.5, "q + p*q")
    grid = sx.star_grid(f(P, Q), g(P, Q), spec, HB)
    idx = [(20, 30), (32, 40), (28, 35), (40, 22)]
    pts = np.array([[P[i, j], Q[i, j]] for i, j in idx])
    assert np.max(np.abs(np.array([grid[i, j] for i, j in idx]) - sx.star(f, g, pts, HB))) <= 1e-6


def test_moyal_oracle_examples():
    f, g = Observable.parse("p*q + 1"), Observable.parse("q**2 - p")
    assert np.allclose(sx.moyal_series_oracle(f, g, 0, PTS, HB), f(*PTS.T) * g(*PTS.T))
    qp = sx.moyal_expression(Observable.q(), Observable.p(), 1)
    h = sp.Symbol("hbar", positive=True)
    assert sp.simplify(qp - (P_SYM * Q_SYM + sp.I * h / 2 * sx.COMMUTATOR_SIGN)) == 0
    pp_qq = sx.moyal_expression(Observable.parse("p**2"), Observable.parse("q**2"), 2)
    assert sp.expand(pp_qq).subs({P_SYM: 0, Q_SYM: 0}) == -h ** 2 / 2


@pytest.mark.parametrize("fs, gs", [("q", "p"), ("p**2", "q**2"), ("p*q", "q + p**2"), ("q**2 - p", "p*q")])
def test_star_matches_moyal_on_polynomials(fs, gs):
    f, g = Observable.parse(fs), Observable.parse(gs)
    ref = sx.moyal_series_oracle(f, g, 4, PTS, HB)
    assert np.max(np.abs(sx.star(f, g, PTS, HB) - ref)) <= 2e-3


def test_exact_moyal_product_is_observable():
    prod = sx.moyal_product(Observable.q(), Observable.p(), HB)
    assert prod(0.7, -0.2) == pytest.approx(0.7 * -0.2 + 0.5j * HB)


def test_rejects_unsupported_inputs():
    with pytest.raises(ValueError):
        sx.star(Observable.parse("p**3"), Observable.q(), PTS, HB)
    with pytest.raises(TypeError):
        sx.star(lambda p, q: p, Observable.q(), PTS, HB)
    with pytest.raises(ValueError):
        sx.moyal_series_oracle(gauss(0.5), Observable.q(), 1, PTS, HB)


def test_calibration_report():
    cal = sx.calibrate_star(HB)
    assert cal["normalization_ratio"] == pytest.approx(1.0, abs=1e-3)
    assert cal["commutator_over_i_hbar"] == pytest.approx(sx.COMMUTATOR_SIGN, abs=2e-3)
    assert cal["phase_factor"] == sx.PHASE_FACTOR


# properties --------------------------------------------------------------------

quad = st.lists(st.floats(-1, 1, allow_nan=False), min_size=6, max_size=6)
MONOS = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


def _poly(c, envelope=None):
    return Observable(tuple((i, j, x) for (i, j), x in zip(MONOS, c)), envelope)


@settings(max_examples=6)
@given(quad, quad, quad, st.integers(0, 2 ** 32 - 1))
def test_associativity_on_enveloped_quadratics(cf, cg, ch, seed):
    spec = GridSpec(6.0, 64)
    P, Q = spec.mesh()
    f, g, h = (_poly(c, s)(P, Q) for c, s in zip((cf, cg, ch), (1.2, 1.0, 1.1)))
    left = sx.star_grid(sx.star_grid(f, g, spec, HB), h, spec, HB)
    right = sx.star_grid(f, sx.star_grid(g, h, spec, HB), spec, HB)
    rng = np.random.default_rng(seed)
    i, j = rng.integers(16, 48, (2, 8))
    scale = max(1.0, np.max(np.abs(left)))
    assert np.max(np.abs(left[i, j] - right[i, j])) <= 5e-3 * scale


@settings(max_examples=8)
@given(quad, quad, st.tuples(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5)))
def test_star_matches_moyal_random(cf, cg, m):
    f, g = _poly(cf), _poly(cg)
    ref = sx.moyal_series_oracle(f, g, 4, [m], HB)
    assert abs(sx.star(f, g, [m], HB)[0] - ref[0]) <= 2e-3 * (1 + abs(ref[0]))


def test_classical_limit_and_bracket():
    f, g = Observable.parse("1 + p*q", envelope=1.0), Observable.parse("q**2 - p", envelope=1.3)
    pt = np.array([[0.3, -0.4]])
    fg = (f(*pt.T) * g(*pt.T))[0]
    _, fp, fq = f.with_gradient(*pt.T)
    _, gp, gq = g.with_gradient(*pt.T)
    bracket = (fq * gp - fp * gq)[0]
    errs, anti = [], None
    for h in (0.5, 0.25, 0.125):
        a, b = sx.star(f, g, pt, h)[0], sx.star(g, f, pt, h)[0]
        errs.append(abs(a - fg))
        anti = (a - b) / (1j * h)
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert orders.min() >= 0.9
    assert abs(anti - bracket) <= 0.1 * abs(bracket)
