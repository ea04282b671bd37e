import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pathquant.geometry import (HOLONOMY_SIGN, PhasePoint, check_hbar, symplectic_pairing,
                                transport_phase, triangle_area)

coord = st.floats(-50, 50, allow_nan=False)
point = st.tuples(coord, coord)
hbar = st.floats(0.05, 5.0)


@pytest.mark.parametrize("u0, u1, expected", [
    ((0, 0), (1, 1), 0.0),
    ((1, 0), (0, 1), 1.0),
    ((2, 3), (5, 7), -1.0),
])
def test_pairing_examples(u0, u1, expected):
    assert symplectic_pairing(u0, u1) == expected


@pytest.mark.parametrize("u, v, z, expected", [
    ((0, 0), (1, 0), (0, 1), 0.5),
    ((0, 0), (2, 0), (0, 3), 3.0),
    ((1, 2), (1, 2), (-4, 7), 0.0),
])
def test_area_examples(u, v, z, expected):
    assert triangle_area(u, v, z) == expected


def test_transport_examples():
    assert transport_phase((0.3, -1.2), (0.3, -1.2)) == 1
    assert np.isclose(transport_phase((1, 0), (0, 1), 1.0), np.exp(0.5j), rtol=0, atol=1e-15)
    a = transport_phase((1.5, 0.2), (-0.7, 2.0), 0.7)
    b = transport_phase((-0.7, 2.0), (1.5, 0.2), 0.7)
    assert np.isclose(b, np.conj(a), rtol=0, atol=1e-15)


def test_phase_point_and_hbar_validation():
    assert np.array_equal(np.asarray(PhasePoint(1.0, 2.0)), [1.0, 2.0])
    with pytest.raises(ValueError):
        PhasePoint(np.nan, 0.0)
    for bad in (0.0, -1.0, np.inf):
        with pytest.raises(ValueError):
            check_hbar(bad)
    with pytest.raises(ValueError):
        symplectic_pairing((1, 2, 3), (0, 1))


def test_broadcasting_over_grids():
    u = np.random.default_rng(0).standard_normal((5, 7, 2))
    v = np.random.default_rng(1).standard_normal((5, 7, 2))
    assert symplectic_pairing(u, v).shape == (5, 7)
    assert transport_phase(u, v).shape == (5, 7)


@given(point, point, hbar)
def test_transport_round_trip(u0, u1, h):
    assert abs(transport_phase(u0, u1, h) * transport_phase(u1, u0, h) - 1) <= 1e-12


@given(point, point, point)
def test_area_totally_antisymmetric(u, v, z):
    a = triangle_area(u, v, z)
    scale = 1e-12 * (1 + max(map(abs, u + v + z))) ** 2
    assert abs(triangle_area(v, z, u) - a) <= scale
    assert abs(triangle_area(v, u, z) + a) <= scale
    assert abs(triangle_area(u, z, v) + a) <= scale


@given(point, point, point, point)
def test_area_translation_invariant(u, v, z, t):
    shift = lambda x: (x[0] + t[0], x[1] + t[1])
    scale = 1e-10 * (1 + max(map(abs, u + v + z + t))) ** 2
    assert abs(triangle_area(shift(u), shift(v), shift(z)) - triangle_area(u, v, z)) <= scale


@given(point, point, point, hbar)
def test_holonomy_around_triangle(u, v, z, h):
    loop = transport_phase(u, v, h) * transport_phase(v, z, h) * transport_phase(z, u, h)
    expected = np.exp(1j * HOLONOMY_SIGN * triangle_area(u, v, z) / h)
    # phases up to ~5e4 rad: allow relative round-off on the argument
    bound = 1e-12 * (1 + max(map(abs, u + v + z))) ** 2 / h
    assert abs(loop - expected) <= max(1e-12, bound)
