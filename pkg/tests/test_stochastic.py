import numpy as np
import pytest

from pathquant import stochastic as wn


def test_same_seed_same_paths():
    a = wn.path_values(64, 3, range(5))
    assert np.array_equal(a, wn.path_values(64, 3, range(5)))
    assert not np.array_equal(a, wn.path_values(64, 4, range(5)))
    # any subset regenerates bit for bit
    assert np.array_equal(a[[1, 3]], wn.path_values(64, 3, [1, 3]))
    paths = wn.sample_paths(32, 2, 9)
    assert paths[0].values[0] == 0 and paths[1].n_steps == 32 and paths[1].index == 1


def test_endpoint_moments():
    n = 100_000
    x1 = wn.path_values(4, 2024, range(n))[:, -1]
    assert abs(x1.mean()) <= 3 / np.sqrt(n)
    assert abs(np.mean(x1 ** 2) - 1) <= 3 * np.sqrt(2) / np.sqrt(n)


def test_prescription_sum_examples():
    x = wn.path_values(256, 1, [0])[0]
    for F in (wn.left_point(2.5), wn.midpoint(2.5)):
        assert wn.prescription_sum(x, F) == pytest.approx(2.5 * x[-1], abs=1e-12)
    G = wn.get_function("sin")
    assert wn.prescription_sum(x, wn.exact_difference("sin")) == pytest.approx(G(x[-1]) - G(0.0), abs=1e-12)
    gap = wn.prescription_sum(x, wn.midpoint("x")) - wn.prescription_sum(x, wn.left_point("x"))
    assert gap == pytest.approx(0.5 * np.sum(np.diff(x) ** 2), abs=1e-12)


def test_registry():
    assert wn.get_function([1, 0, 2])(2.0) == 9.0
    assert wn.get_function("x^3").df(2.0) == 12.0
    for f in wn.FUNCTIONS.values():
        x = np.linspace(-1, 1, 5)
        h = 1e-6
        assert np.allclose(f.df(x), (f(x + h) - f(x - h)) / (2 * h), atol=1e-6)
        assert np.allclose(f.d2f(x), (f.df(x + h) - f.df(x - h)) / (2 * h), atol=1e-6)
    with pytest.raises(ValueError):
        wn.get_function("tan")
    with pytest.raises(ValueError):
        wn.polynomial([1, 2, 3, 4, 5, 6])


def test_correction_for_identity_and_constant():
    ns = [2 ** k for k in range(4, 10)]
    rows = wn.correction_experiment("x", ns, 2000, 5)
    # six independent resolutions: 4 sigma keeps the family-wise false-alarm rate small
    for r in rows:
        assert abs(r["mean_d"] - 0.5) <= 4 * r["se_d"]
    rate = np.polyfit(np.log(ns), np.log([r["l2_error"] for r in rows]), 1)[0]
    assert rate == pytest.approx(-0.5, abs=0.1)
    for r in wn.correction_experiment(3.0, ns[:3], 200, 5):
        assert r["mean_d"] == 0 and r["l2_error"] == 0


def test_correction_for_square_decreases():
    rows = wn.correction_experiment("x^2", [2 ** k for k in range(4, 13)], 2000, 11)
    for a, b in zip(rows, rows[1:]):
        assert b["l2_error"] < a["l2_error"] + 2 * np.hypot(a["stderr"], b["stderr"])


def test_results_do_not_depend_on_chunking():
    a = wn.correction_experiment("sin", [16, 64], 300, 8, chunk=7)
    b = wn.correction_experiment("sin", [16, 64], 300, 8, chunk=256)
    assert a == b


def test_second_order_examples():
    ns = [16, 64, 256, 1024]
    F = wn.second_order("sin", "x")
    assert all(r["l2_difference"] == 0 for r in wn.second_order_welldefined(F, F, ns, 100, 1))
    same = wn.second_order_welldefined(wn.left_point("x"), wn.midpoint_second_order("x", 0.0), ns, 200, 1)
    assert all(r["l2_difference"] <= 1e-12 for r in same)
    rows = wn.second_order_welldefined(wn.second_order("sin", "cos"), wn.midpoint_second_order("sin", "cos"),
                                       ns, 1000, 2)
    vals = [r["l2_difference"] for r in rows]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_quadratic_variation():
    rows = wn.quadratic_variation([16, 64, 256, 1024], 2000, 3)
    for r in rows:
        assert abs(r["mean"] - 1) <= 3 * r["se"]
    l2 = [r["l2_to_one"] for r in rows]
    assert all(b < a for a, b in zip(l2, l2[1:]))
    assert l2[-1] == pytest.approx(np.sqrt(2 / 1024), rel=0.1)


def test_smooth_path_gap_is_second_order_and_predicted():
    gaps = []
    for n in (2 ** 10, 2 ** 11, 2 ** 12):
        gap, pred = wn.smooth_path_gap("x^2", n)
        assert gap == pytest.approx(pred, rel=1e-2)
        gaps.append(gap)
    assert np.log2(gaps[0] / gaps[2]) / 2 == pytest.approx(1.0, abs=0.05)


def test_validation():
    with pytest.raises(ValueError):
        wn.path_values(1, 0, [0])
