import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from pathquant.observables import P_SYM, Q_SYM, Observable


def test_parse_and_evaluate():
    f = Observable.parse("p*q + 2*q**2 - 3")
    assert f.degree == 2 and f.is_polynomial and f.is_real
    assert f(1.5, -2.0) == pytest.approx(1.5 * -2.0 + 8 - 3)
    assert sp.expand(f.to_sympy() - (P_SYM * Q_SYM + 2 * Q_SYM ** 2 - 3)) == 0


def test_validation():
    with pytest.raises(ValueError):
        Observable.parse("p**5")
    with pytest.raises(ValueError):
        Observable.constant(1.0, envelope=-1.0)
    with pytest.raises(ValueError):
        Observable.q() + Observable.constant(1.0, envelope=2.0)


def test_envelope_product_combines_widths():
    a = Observable.constant(1.0, envelope=1.0)
    b = Observable.constant(1.0, envelope=2.0)
    x = np.array([0.3, 1.7])
    assert np.allclose((a * b)(x, -x), a(x, -x) * b(x, -x))


coef = st.floats(-3, 3, allow_nan=False)


@given(coef, coef, coef, coef, st.floats(-2, 2), st.floats(-2, 2))
def test_gradient_matches_sympy(c1, c2, c3, c4, p, q):
    f = Observable(((1, 1, c1), (2, 0, c2), (0, 3, c3), (0, 0, c4)), envelope=1.3)
    expr = f.to_sympy() * sp.exp(-(P_SYM ** 2 + Q_SYM ** 2) / (2 * sp.Float(1.3) ** 2))
    val, fp, fq = f.with_gradient(p, q)
    sub = {P_SYM: p, Q_SYM: q}
    assert complex(val) == pytest.approx(complex(expr.subs(sub)), abs=1e-9)
    assert complex(fp) == pytest.approx(complex(sp.diff(expr, P_SYM).subs(sub)), abs=1e-9)
    assert complex(fq) == pytest.approx(complex(sp.diff(expr, Q_SYM).subs(sub)), abs=1e-9)


@given(coef, coef, coef, st.floats(-2, 2), st.floats(-2, 2), st.floats(-1, 1), st.floats(-1, 1))
def test_shift(c1, c2, c3, dp, dq, p, q):
    f = Observable(((1, 1, c1), (2, 0, c2), (0, 2, c3)))
    assert complex(f.shifted(dp, dq)(p, q)) == pytest.approx(complex(f(p + dp, q + dq)), abs=1e-9)


@given(coef, coef, st.floats(-2, 2), st.floats(-2, 2))
def test_algebra(a, b, p, q):
    f, g = Observable.parse("p*q"), Observable.parse("q - p**2")
    assert complex((f * a + g * b)(p, q)) == pytest.approx(complex(a * f(p, q) + b * g(p, q)), abs=1e-9)
    assert complex((f * g)(p, q)) == pytest.approx(complex(f(p, q) * g(p, q)), abs=1e-9)
