import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathquant import states as ss
from pathquant.grid import GridSection, GridSpec

HB = 1.0
SPEC = GridSpec(10.0, 64)          # Kähler-type states at hbar = 1
WIDE = GridSpec(12.0, 64)          # room for randomly squeezed polarizations
WIN = ss.plateau_window(3.5, 0.8)
VSPEC = GridSpec(7.5, 48)


def kahler_state(n, spec=SPEC, hbar=HB, pol=None):
    pol = ss.LinearPolarization.kahler() if pol is None else pol
    return ss.make_polarized(pol, ss.hermite_profile(n, np.sqrt(2 * hbar)), spec, hbar).normalized()


# domain types ------------------------------------------------------------

def test_grid_spec_validation():
    assert GridSpec(6.0, 24).spacing == pytest.approx(12.0 / 23)
    for bad in [(0.0, 24), (-1.0, 24), (5.0, 7), (5.0, 10.5)]:
        with pytest.raises(ValueError):
            GridSpec(*bad)


def test_section_validation():
    with pytest.raises(ValueError):
        GridSection(GridSpec(5.0, 8), np.zeros((8, 9)))
    with pytest.raises(ValueError):
        GridSection(GridSpec(5.0, 8), np.full((8, 8), np.nan))
    sec = GridSection(GridSpec(5.0, 8), np.ones((8, 8)))
    with pytest.raises(ValueError):
        sec.check_decay()
    with pytest.raises(ValueError):
        sec.values[0, 0] = 2.0          # immutable


def test_polarization_validation():
    with pytest.raises(ValueError):
        ss.LinearPolarization(1, 1, 1, 1)
    pol = ss.LinearPolarization.random(np.random.default_rng(3), 0.3)
    assert abs(pol.a * pol.d - pol.b * pol.c - 1) <= 1e-12
    assert ss.LinearPolarization.vertical().is_real
    assert not ss.LinearPolarization.kahler().is_real


# make_polarized ------------------------------------------------------------

def test_vertical_gaussian_closed_form():
    sec = ss.make_polarized(ss.LinearPolarization.vertical(), lambda x: np.exp(-x ** 2 / (2 * HB)),
                            VSPEC, HB, window=WIN)
    P, Q = VSPEC.mesh()
    expected = np.exp(0.5j * P * Q / HB) * np.exp(-P ** 2 / (2 * HB)) * WIN(Q)
    assert np.max(np.abs(sec.values - expected)) <= 1e-15


def test_zero_profile_gives_zero_section():
    sec = ss.make_polarized(ss.LinearPolarization.kahler(), lambda x: 0 * x, SPEC, HB)
    assert not np.any(sec.values)
    assert ss.pathintegral_inner(kahler_state(0), ss.zero_section(SPEC)) == 0


def test_horizontal_norm_matches_vertical():
    g = ss.gaussian_profile(np.sqrt(HB))
    v = ss.make_polarized(ss.LinearPolarization.vertical(), g, VSPEC, HB, window=WIN)
    h = ss.make_polarized(ss.LinearPolarization.horizontal(), g, VSPEC, HB, window=WIN)
    # closed form: int e^{-p^2} dp * int win(q)^2 dq, and the same with p, q swapped
    assert h.norm_l2() == pytest.approx(v.norm_l2(), rel=1e-12)
    x = np.linspace(-40, 40, 200001)
    win2 = np.trapezoid(WIN(x) ** 2, x)
    assert v.norm_l2() ** 2 == pytest.approx(np.sqrt(np.pi * HB) * win2, rel=1e-6)


def test_real_polarization_needs_window():
    with pytest.raises(ValueError):
        ss.make_polarized(ss.LinearPolarization.vertical(), ss.gaussian_profile(1.0), VSPEC, HB)
    with pytest.raises(ValueError):
        ss.make_polarized(ss.LinearPolarization.kahler(), ss.gaussian_profile(1.0), SPEC, HB, window=WIN)


# inner products -------------------------------------------------------------

def test_l2_examples():
    g = kahler_state(0)
    assert abs(ss.l2_inner(g, g) - 1) <= 1e-6
    assert abs(ss.l2_inner(kahler_state(0), kahler_state(1))) <= 1e-6
    lam = 0.3 - 2.1j
    assert ss.l2_inner(g, g * lam) == pytest.approx(lam * ss.l2_inner(g, g), rel=1e-12)


def test_ground_state_pairing_is_one_after_normalizing():
    g = kahler_state(0)
    c = ss.calibrate_pairing_constant(SPEC, HB)
    assert c == pytest.approx(ss.pairing_constant(HB), rel=1e-6)
    assert abs(ss.pathintegral_inner(g, g) / c - 1) <= 1e-3


def test_gaussian_pairing_closed_form():
    # vacuum of p + i q at width sqrt(2 hbar): |psi|^2 = exp(-(p^2 + q^2) / (2 hbar)),
    # L2 norm^2 = 2 pi hbar, and the pairing is that divided by pi hbar
    for hbar in (0.5, 1.0, 2.0):
        spec = GridSpec.for_hbar(hbar, 64, 10.0)
        vac = ss.make_polarized(ss.LinearPolarization.kahler(), ss.gaussian_profile(np.sqrt(2 * hbar)),
                                spec, hbar)
        assert ss.l2_inner(vac, vac).real == pytest.approx(2 * np.pi * hbar, rel=1e-10)
        assert ss.pathintegral_inner(vac, vac) == pytest.approx(2.0, rel=1e-8)


def test_orthogonal_profiles_pair_to_zero():
    assert abs(ss.pathintegral_inner(kahler_state(0), kahler_state(1))) <= 1e-3


def test_negative_norm_witness():
    spec = GridSpec(6.0, 24)
    sec, value, eig = ss.negative_norm_witness(spec, HB)
    assert value < 0 and eig < 0
    sec.check_decay()
    norm = ss.pathintegral_inner(sec, sec)
    assert abs(norm.imag) <= 1e-6 * abs(norm)
    assert norm.real < 0


def test_gram_form_spectrum():
    g = ss.gram_form(GridSpec(6.0, 16), HB)
    assert np.allclose(g, g.conj().T)
    ev = np.linalg.eigvalsh(g)
    assert ev.min() < 0 < ev.max()
    with pytest.raises(ValueError):
        ss.gram_form(GridSpec(6.0, 64), HB)


# properties -------------------------------------------------------------------

def _random_section(seed, spec=SPEC):
    r = np.random.default_rng(seed)
    P, Q = spec.mesh()
    vals = np.zeros_like(P, dtype=complex)
    for _ in range(3):
        c = r.uniform(-2, 2, 2)
        vals += complex(*r.standard_normal(2)) * np.exp(-((P - c[0]) ** 2 + (Q - c[1]) ** 2) / 2
                                                     + 1j * r.uniform(-1, 1) * P)
    return GridSection(spec, vals, HB).check_decay()


@settings(max_examples=25)
@given(st.integers(0, 2 ** 32 - 1))
def test_self_pairing_is_real(seed):
    psi = _random_section(seed)
    v = ss.pathintegral_inner(psi, psi)
    assert abs(v.imag) <= 1e-6 * max(1.0, ss.l2_inner(psi, psi).real)


@settings(max_examples=25)
@given(st.integers(0, 2 ** 32 - 1), st.complex_numbers(max_magnitude=5), st.complex_numbers(max_magnitude=5))
def test_sesquilinear(seed, a, b):
    x, y, z = (_random_section(seed + k) for k in range(3))
    left = ss.pathintegral_inner(x, y * a + z * b)
    assert left == pytest.approx(a * ss.pathintegral_inner(x, y) + b * ss.pathintegral_inner(x, z),
                                 rel=1e-9, abs=1e-12)
    right = ss.pathintegral_inner(y * a + z * b, x)
    assert right == pytest.approx(np.conj(a) * ss.pathintegral_inner(y, x)
                                  + np.conj(b) * ss.pathintegral_inner(z, x), rel=1e-9, abs=1e-12)


@settings(max_examples=15)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([0.5, 1.0, 2.0]))
def test_pairing_identity_on_shared_random_polarization(seed, hbar):
    r = np.random.default_rng(seed)
    spec = GridSpec.for_hbar(hbar, 64, 12.0)
    c = ss.calibrate_pairing_constant(spec, hbar)
    pol = ss.LinearPolarization.random(r, 0.15)
    width = np.sqrt(2 * hbar)
    n1, n0 = r.integers(0, 4, 2)
    s1 = ss.make_polarized(pol, ss.hermite_profile(n1, width), spec, hbar).normalized()
    s0 = ss.make_polarized(pol, ss.hermite_profile(n0, width), spec, hbar).normalized()
    assert abs(ss.pathintegral_inner(s1, s0) - c * ss.l2_inner(s1, s0)) <= 1e-3


def test_pairing_matrix_between_polarizations_is_scaled_isometry():
    a = ss.orthonormal_polarized_basis(ss.LinearPolarization.kahler(), 8, WIDE, HB)
    b = ss.orthonormal_polarized_basis(ss.LinearPolarization.kahler(1.4), 3, WIDE, HB,
                                       width=np.sqrt(2 * 1.4 * HB))
    g = ss.pairing_matrix(a, b)
    gram = g.conj().T @ g
    assert np.max(np.abs(gram / gram[0, 0].real - np.eye(3))) <= 5e-3
    assert g[0, 0] == pytest.approx(ss.pathintegral_inner(a[0], b[0]), rel=1e-12)


def test_mismatched_grids_rejected():
    with pytest.raises(ValueError):
        ss.l2_inner(kahler_state(0), kahler_state(0, spec=GridSpec(10.0, 48)))
