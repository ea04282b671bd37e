"""Prescription-dependent Riemann sums along Brownian paths.

Randomness: path ``i`` at resolution ``n`` draws its increments from
``numpy.random.default_rng(SeedSequence(seed, spawn_key=(n, i)))``, so any
subset of paths can be regenerated, in any order or process, bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

REFINEMENT = 8


# registered one-variable functions ----------------------------------------------

@dataclass(frozen=True)
class SmoothFunction:
    """A one-variable function with closed-form first and second derivatives."""

    name: str
    f: Callable = field(repr=False)
    df: Callable = field(repr=False)
    d2f: Callable = field(repr=False)

    def __call__(self, x):
        return self.f(x)


def polynomial(coeffs, name=None):
    """``sum c_k x^k`` with ``coeffs = [c_0, c_1, ...]`` (degree <= 4)."""
    c = np.asarray(coeffs, dtype=float)
    if c.size > 5:
        raise ValueError("registered polynomials have degree <= 4")
    P = np.polynomial.Polynomial(c)
    d1, d2 = P.deriv(1), P.deriv(2)
    return SmoothFunction(name or f"poly{list(c)}", P, d1, d2)


FUNCTIONS = {
    "zero": polynomial([0.0], "zero"),
    "one": polynomial([1.0], "one"),
    "x": polynomial([0.0, 1.0], "x"),
    "x^2": polynomial([0.0, 0.0, 1.0], "x^2"),
    "x^3": polynomial([0.0, 0.0, 0.0, 1.0], "x^3"),
    "sin": SmoothFunction("sin", np.sin, np.cos, lambda x: -np.sin(x)),
    "cos": SmoothFunction("cos", np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x)),
    "gauss": SmoothFunction("gauss", lambda x: np.exp(-x * x),
                            lambda x: -2 * x * np.exp(-x * x),
                            lambda x: (4 * x * x - 2) * np.exp(-x * x)),
}


def get_function(spec):
    """A registered name, a constant, or a coefficient list."""
    if isinstance(spec, SmoothFunction):
        return spec
    if isinstance(spec, str):
        try:
            return FUNCTIONS[spec]
        except KeyError:
            raise ValueError(f"unknown function {spec!r}; choose from {sorted(FUNCTIONS)}") from None
    if isinstance(spec, (int, float)):
        return polynomial([float(spec)], f"const{spec}")
    return polynomial(spec)


# two-point prescriptions ------------------------------------------------------------

def left_point(f):
    f = get_function(f)
    return lambda x, y: f(x) * (y - x)


def midpoint(f):
    f = get_function(f)
    return lambda x, y: f(0.5 * (x + y)) * (y - x)


def second_order(f, g):
    """``f(x) (y - x) + g(x) (y - x)^2``."""
    f, g = get_function(f), get_function(g)
    return lambda x, y: f(x) * (y - x) + g(x) * (y - x) ** 2


def midpoint_second_order(f, g):
    """Midpoint-based ``F`` with the same first and second ``y``-derivatives on
    the diagonal as ``second_order(f, g)``."""
    f, g = get_function(f), get_function(g)
    return lambda x, y: f(0.5 * (x + y)) * (y - x) + (g(x) - 0.5 * f.df(x)) * (y - x) ** 2


def exact_difference(G):
    G = get_function(G)
    return lambda x, y: G(y) - G(x)


# paths ------------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WienerPath:
    times: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    seed: int = 0
    index: int = 0

    @property
    def n_steps(self):
        return len(self.times) - 1


def path_generator(seed, n_steps, index):
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(n_steps), int(index))))


def path_values(n_steps, seed, indices):
    """``(len(indices), n_steps + 1)`` array of Brownian samples on the uniform partition."""
    if n_steps < 2:
        raise ValueError("need at least 2 steps")
    out = np.zeros((len(indices), n_steps + 1))
    scale = np.sqrt(1.0 / n_steps)
    for row, i in enumerate(indices):
        inc = path_generator(seed, n_steps, i).standard_normal(n_steps)
        np.cumsum(inc * scale, out=out[row, 1:])
    return out


def sample_paths(n_steps, n_paths, seed):
    t = np.linspace(0.0, 1.0, n_steps + 1)
    vals = path_values(n_steps, seed, range(n_paths))
    return [WienerPath(t, v, int(seed), i) for i, v in enumerate(vals)]


def smooth_path(n_steps, amplitude=1.0, modes=((1, 1.0), (3, 0.5)), phase=0.3):
    """Deterministic smooth path ``x(t) = A sum_k a_k sin(2 pi k t + phase) - x(0)``."""
    t = np.linspace(0.0, 1.0, n_steps + 1)
    x = sum(a * np.sin(2 * np.pi * k * t + phase) for k, a in modes)
    return WienerPath(t, amplitude * (x - x[0]), -1, 0)


def prescription_sum(path, F):
    """``sum_i F(x_i, x_{i+1})`` along ``path`` (a WienerPath or value array)."""
    x = path.values if isinstance(path, WienerPath) else np.asarray(path)
    return np.sum(F(x[..., :-1], x[..., 1:]), axis=-1)


def _trapezoid_time(values):
    n = values.shape[-1] - 1
    return (np.sum(values, axis=-1) - 0.5 * (values[..., 0] + values[..., -1])) / n


def _chunks(n, size):
    for start in range(0, n, size):
        yield range(start, min(n, start + size))


def _rms(squares, key):
    """Root mean square of per-path squared errors, with its delta-method
    standard error."""
    ms = float(np.mean(squares))
    se_ms = float(np.std(squares, ddof=1) / np.sqrt(len(squares)))
    rms = np.sqrt(ms)
    return {key: float(rms), "stderr": se_ms / (2 * rms) if rms > 0 else 0.0}


def correction_experiment(f, n_steps_list, n_paths, seed, chunk=256):
    """For each resolution ``n``: Monte Carlo of ``D_n = midpoint - left`` and
    of the L2 error ``sqrt(E|D_n - R|^2)``, where ``R = 1/2 int f'(x(t)) dt``
    comes from the trapezoid rule on the same path refined ``REFINEMENT`` times.

    Returns a list of dicts with keys ``n_steps, mean_d, se_d, l2_error,
    stderr, n_paths, seed``.
    """
    f = get_function(f)
    mid, left = midpoint(f), left_point(f)
    rows = []
    for n in n_steps_list:
        d_all = np.empty(n_paths)
        e_all = np.empty(n_paths)
        for idx in _chunks(n_paths, chunk):
            fine = path_values(REFINEMENT * n, seed, idx)
            coarse = fine[:, ::REFINEMENT]
            d = prescription_sum(coarse, mid) - prescription_sum(coarse, left)
            r = 0.5 * _trapezoid_time(f.df(fine))
            d_all[idx.start:idx.stop] = d
            e_all[idx.start:idx.stop] = (d - r) ** 2
        rows.append({
            "n_steps": int(n),
            "mean_d": float(np.mean(d_all)),
            "se_d": float(np.std(d_all, ddof=1) / np.sqrt(n_paths)),
            **_rms(e_all, "l2_error"),
            "n_paths": int(n_paths),
            "seed": int(seed),
        })
    return rows


def second_order_welldefined(F1, F2, n_steps_list, n_paths, seed, chunk=256):
    """Monte Carlo of the L2 distance ``sqrt(E|sum F1 - sum F2|^2)`` per resolution."""
    rows = []
    for n in n_steps_list:
        sq = np.empty(n_paths)
        for idx in _chunks(n_paths, chunk):
            x = path_values(n, seed, idx)
            sq[idx.start:idx.stop] = (prescription_sum(x, F1) - prescription_sum(x, F2)) ** 2
        rows.append({"n_steps": int(n), **_rms(sq, "l2_difference"),
                     "n_paths": int(n_paths), "seed": int(seed)})
    return rows


def quadratic_variation(n_steps_list, n_paths, seed):
    """Mean and L2 distance to 1 of ``sum (dx)^2`` per resolution."""
    rows = []
    for n in n_steps_list:
        x = path_values(n, seed, range(n_paths))
        qv = np.sum(np.diff(x, axis=1) ** 2, axis=1)
        rows.append({"n_steps": int(n), "mean": float(qv.mean()),
                     "se": float(qv.std(ddof=1) / np.sqrt(n_paths)),
                     "l2_to_one": float(np.sqrt(np.mean((qv - 1) ** 2)))})
    return rows


def smooth_path_gap(f, n_steps, **path_kw):
    """``|midpoint - left|`` on a smooth path, and its leading-order
    prediction ``1/2 sum f'(x_i) dx_i^2`` (which shrinks like ``1/n``)."""
    f = get_function(f)
    path = smooth_path(n_steps, **path_kw)
    gap = prescription_sum(path, midpoint(f)) - prescription_sum(path, left_point(f))
    dx = np.diff(path.values)
    pred = 0.5 * np.sum(f.df(path.values[:-1]) * dx * dx)
    return float(abs(gap)), float(abs(pred))
