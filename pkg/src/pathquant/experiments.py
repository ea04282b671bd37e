"""Registry of batch experiments.  Each takes a parameter dict and a derived
integer seed and returns tables, tolerance checks and metadata."""
from __future__ import annotations

import time
import zlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import quantizer as qz
from . import simplicial as sx
from . import star as st
from . import states as ss
from . import stochastic as wn
from .grid import GridSpec
from .observables import Observable


@dataclass
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool
    relation: str = "<="

    def to_json(self):
        return {"name": self.name, "value": _finite(self.value), "tolerance": self.tolerance,
                "relation": self.relation, "passed": bool(self.passed)}


def _finite(x):
    x = float(x)
    return x if np.isfinite(x) else str(x)


def at_most(name, value, tol):
    value = float(value)
    return Check(name, value, tol, bool(np.isfinite(value) and value <= tol))


def below(name, value, bound):
    value = float(value)
    return Check(name, value, bound, bool(np.isfinite(value) and value < bound), "<")


@dataclass
class Result:
    tables: dict = field(default_factory=dict)      # name -> (header, rows)
    checks: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    defaults: dict
    runner: Callable

    def run(self, params, seed):
        merged = dict(self.defaults)
        merged.update(params)
        return self.runner(merged, seed)


REGISTRY: dict[str, Experiment] = {}


def experiment(name, description, **defaults):
    def wrap(fn):
        REGISTRY[name] = Experiment(name, description, defaults, fn)
        return fn
    return wrap


def derive_seed(seed, name):
    """Experiment seed: first word of ``SeedSequence([seed, crc32(name)])``."""
    ss_ = np.random.SeedSequence([int(seed), zlib.crc32(name.encode())])
    return int(ss_.generate_state(1, dtype=np.uint32)[0])


def _rel_masked(a, b, mask):
    ref = np.max(np.abs(b[mask]))
    return float(np.max(np.abs(a[mask] - b[mask])) / ref)


def _rel(a, b):
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


# states ------------------------------------------------------------------------

@experiment("negative-norm", "smallest eigenvalue of the discretized pairing and a decaying witness",
            n=24, half_width=6.0, hbar=1.0, threshold=-0.1, witness_tol=1e-3)
def _negative_norm(p, seed):
    spec = GridSpec(p["half_width"], p["n"])
    t0 = time.perf_counter()
    sec, value, eig = ss.negative_norm_witness(spec, p["hbar"], p["threshold"])
    res = Result()
    res.tables["negative_norm"] = (
        ["quantity", "value"],
        [["min_eigenvalue", eig], ["witness_value", value],
         ["pairing_constant", ss.pairing_constant(p["hbar"])],
         ["witness_boundary_ratio", sec.boundary_ratio()]])
    res.checks += [below("min_eigenvalue", eig, p["threshold"]),
                   at_most("witness_reproduces_eigenvalue", abs(value - eig), p["witness_tol"])]
    res.metadata["runtime_s"] = time.perf_counter() - t0
    return res


@experiment("inner-product-identity", "path-integral pairing versus C times the L2 pairing on polarized states",
            n=64, half_width=12.0, hbar=1.0, pairs=[[0, 1], [1, 1], [0, 2], [2, 2], [1, 3], [3, 4]],
            polarization="random", squeeze=1.0, tol=1e-3)
def _pairing_identity(p, seed):
    hbar = p["hbar"]
    spec = GridSpec.for_hbar(hbar, p["n"], p["half_width"])
    rng = np.random.default_rng(seed)
    if p["polarization"] not in ("random", "kahler"):
        raise ValueError("polarization must be 'random' or 'kahler'")
    pol = ss.LinearPolarization.random(rng, 0.15) if p["polarization"] == "random" \
        else ss.LinearPolarization.kahler(p["squeeze"])
    c_meas = ss.calibrate_pairing_constant(spec, hbar)
    width = np.sqrt(2 * hbar)
    rows, worst = [], 0.0
    for a, b in p["pairs"]:
        s1 = ss.make_polarized(pol, ss.hermite_profile(a, width), spec, hbar).normalized()
        s0 = ss.make_polarized(pol, ss.hermite_profile(b, width), spec, hbar).normalized()
        pi_, l2 = ss.pathintegral_inner(s1, s0), ss.l2_inner(s1, s0)
        err = abs(pi_ - c_meas * l2)
        worst = max(worst, err)
        rows.append([a, b, pi_.real, pi_.imag, (c_meas * l2).real, (c_meas * l2).imag, err])
    res = Result()
    res.tables["pairing"] = (["n1", "n0", "pathintegral_re", "pathintegral_im", "c_l2_re", "c_l2_im", "abs_error"], rows)
    res.checks.append(at_most("max_abs_error", worst, p["tol"]))
    res.metadata.update(pairing_constant=c_meas, polarization=[str(x) for x in pol.matrix.ravel()])
    return res


@experiment("bks-unitarity", "pairing matrix between two Kähler polarizations is a multiple of an isometry",
            n=64, half_width=12.0, hbar=1.0, squeeze=1.4, rows=8, cols=3, tol=5e-3)
def _bks(p, seed):
    hbar = p["hbar"]
    spec = GridSpec.for_hbar(hbar, p["n"], p["half_width"])
    tau = p["squeeze"]
    a = ss.orthonormal_polarized_basis(ss.LinearPolarization.kahler(), p["rows"], spec, hbar)
    b = ss.orthonormal_polarized_basis(ss.LinearPolarization.kahler(tau), p["cols"], spec, hbar,
                                       width=np.sqrt(2 * hbar * tau))
    g = ss.pairing_matrix(a, b)
    gram = g.conj().T @ g
    kappa = gram[0, 0].real
    dev = float(np.max(np.abs(gram / kappa - np.eye(len(b)))))
    res = Result()
    res.tables["bks"] = (["i", "j", "gram_re", "gram_im"],
                         [[i, j, gram[i, j].real, gram[i, j].imag] for i in range(len(b)) for j in range(len(b))])
    res.checks.append(at_most("isometry_deviation", dev, p["tol"]))
    res.metadata.update(scale=kappa, scale_over_c2=kappa / ss.pairing_constant(hbar) ** 2)
    return res


# quantizer -------------------------------------------------------------------

def _vertical_setup(p):
    hbar = p["hbar"]
    spec = GridSpec(p["half_width"], p["n"])
    win = ss.plateau_window(p["plateau"], p["edge"])
    P, Q = spec.mesh()
    mask = np.abs(Q) <= p["compare_halfwidth"]
    return hbar, spec, win, P, Q, mask


@experiment("weyl-agreement", "quantized observables versus Weyl-ordered operators on vertical states",
            n=48, half_width=7.5, plateau=3.5, edge=0.8, compare_halfwidth=1.0, hbar=1.0,
            observables=["q", "p", "q**2", "p**2", "p*q"], hermite=[0, 1], width=1.0, tol=1e-2)
def _weyl(p, seed):
    hbar, spec, win, P, Q, mask = _vertical_setup(p)
    x = spec.axis
    rows, checks = [], []
    for n in p["hermite"]:
        prof = ss.hermite_profile(n, p["width"])
        state = ss.make_polarized(ss.LinearPolarization.vertical(), prof, spec, hbar, window=win)
        for name in p["observables"]:
            f = Observable.parse(name)
            ref = np.exp(0.5j * P * Q / hbar) * win(Q) * \
                qz.weyl_oracle(f, prof(x), x, hbar, "momentum")[:, None]
            try:
                err = _rel_masked(qz.quantize_full(f, state).values, ref, mask)
            except qz.GridResolutionError:
                err = float("inf")
            rows.append([n, name, err])
            checks.append(at_most(f"hermite{n}:{name}", err, p["tol"]))
    res = Result({"weyl": (["hermite", "observable", "rel_error"], rows)}, checks)
    return res


@experiment("ks-agreement", "quantized observables versus the Kostant-Souriau operator",
            n=48, half_width=7.5, plateau=3.5, edge=0.8, compare_halfwidth=1.0, hbar=1.0,
            observables=["1", "q", "p", "p*q"], hermite=[0, 1], width=1.0, tol=2e-3)
def _ks(p, seed):
    hbar, spec, win, P, Q, mask = _vertical_setup(p)
    rows, checks = [], []
    for n in p["hermite"]:
        state = ss.make_polarized(ss.LinearPolarization.vertical(), ss.hermite_profile(n, p["width"]),
                                  spec, hbar, window=win)
        for name in p["observables"]:
            f = Observable.parse(name)
            ks = qz.ks_prequantize(f, state).values
            err = _rel_masked(qz.quantize_full(f, state).values, ks, mask)
            rows.append(["vertical", n, name, err])
            checks.append(at_most(f"vertical:hermite{n}:{name}", err, p["tol"]))
    return Result({"ks": (["polarization", "hermite", "observable", "rel_error"], rows)}, checks)


@experiment("commutator-star", "canonical commutator, star commutator and Q_f Q_g = Q_(f*g)",
            n=64, half_width=10.0, hbar=1.0, hermite=0, tol_commutator=2e-3, tol_product=5e-3,
            gaussian_pairs=[[0.3, 0.2], [0.5, 0.25]], polynomial_pairs=[["q", "p"], ["p*q", "q"], ["p", "p*q"]],
            eval_point=[0.4, -0.3])
def _commutator(p, seed):
    hbar = p["hbar"]
    spec = GridSpec.for_hbar(hbar, p["n"], p["half_width"])
    psi = ss.make_polarized(ss.LinearPolarization.kahler(), ss.hermite_profile(p["hermite"], np.sqrt(2 * hbar)),
                            spec, hbar)
    qf, pf = Observable.q(), Observable.p()
    comm = qz.quantize_full(qf, qz.quantize_full(pf, psi)).values - qz.quantize_full(pf, qz.quantize_full(qf, psi)).values
    sigma_q = (np.vdot(psi.values, comm) / (1j * hbar * np.vdot(psi.values, psi.values))).real
    err_q = _rel(comm, qz.COMMUTATOR_SIGN * 1j * hbar * psi.values)
    pt = [p["eval_point"]]
    sc = (st.star(qf, pf, pt, hbar) - st.star(pf, qf, pt, hbar))[0]
    err_s = abs(sc - st.COMMUTATOR_SIGN * 1j * hbar) / hbar
    rows = [["quantizer_commutator", sigma_q, err_q], ["star_commutator", (sc / (1j * hbar)).real, err_s]]
    checks = [at_most("quantizer_commutator", err_q, p["tol_commutator"]),
              at_most("star_commutator", err_s, p["tol_commutator"]),
              Check("same_sign", float(qz.COMMUTATOR_SIGN * st.COMMUTATOR_SIGN), 1.0,
                    bool(np.sign(sigma_q) == np.sign((sc / (1j * hbar)).real) == qz.COMMUTATOR_SIGN), "==")]
    prod_rows = []
    for a, b in p["gaussian_pairs"]:
        fa = Observable.constant(1.0, envelope=1 / np.sqrt(2 * a))
        fb = Observable.constant(1.0, envelope=1 / np.sqrt(2 * b))
        lhs = qz.quantize_full(fa, qz.quantize_full(fb, psi)).values
        rhs = qz.quantize_full(st.gaussian_star(a, b, hbar), psi).values
        err = _rel(lhs, rhs)
        prod_rows.append([f"gauss({a})", f"gauss({b})", err])
        checks.append(at_most(f"product:gauss{a}*gauss{b}", err, p["tol_product"]))
    for fs, gs in p["polynomial_pairs"]:
        f, g = Observable.parse(fs), Observable.parse(gs)
        lhs = qz.quantize_full(f, qz.quantize_full(g, psi)).values
        rhs = qz.quantize_full(st.moyal_product(f, g, hbar), psi).values
        err = _rel(lhs, rhs)
        prod_rows.append([fs, gs, err])
        checks.append(at_most(f"product:{fs}*{gs}", err, p["tol_product"]))
    res = Result({"commutators": (["quantity", "sign", "rel_error"], rows),
                  "products": (["f", "g", "rel_error"], prod_rows)}, checks)
    res.metadata.update(qz.calibrate_constants(hbar=hbar))
    res.metadata.update(st.calibrate_star(hbar))
    return res


@experiment("polarized-vs-full", "single-integral quantization versus the full double integral",
            n=64, half_width=10.0, hbar=1.0, states=10,
            observables=["1 + q - 2*p + p*q + q**2 - p**2"], tol=2e-3)
def _simp(p, seed):
    hbar = p["hbar"]
    spec = GridSpec.for_hbar(hbar, p["n"], p["half_width"])
    rng = np.random.default_rng(seed)
    rows, worst = [], 0.0
    for k in range(p["states"]):
        psi, pol, n = ss.random_polarized_state(spec, rng, hbar)
        for name in p["observables"]:
            f = Observable.parse(name)
            err = _rel(qz.quantize_polarized(f, psi).values, qz.quantize_full(f, psi).values)
            worst = max(worst, err)
            rows.append([k, n, name, err])
    return Result({"polarized_vs_full": (["state", "hermite", "observable", "rel_error"], rows)},
                  [at_most("max_rel_error", worst, p["tol"])])


# star product ----------------------------------------------------------------

@experiment("star-moyal", "triangle-area star product versus the Moyal series",
            hbar=1.0, pairs=[["q", "p"], ["p", "q"], ["q**2", "p**2"], ["p*q", "q + p**2"]],
            points=[[0.0, 0.0], [0.4, -0.3], [1.5, 1.0], [-2.0, 0.7]], tol=2e-3)
def _star_moyal(p, seed):
    hbar = p["hbar"]
    pts = np.asarray(p["points"], float)
    rows, worst = [], 0.0
    for fs, gs in p["pairs"]:
        f, g = Observable.parse(fs), Observable.parse(gs)
        val = st.star(f, g, pts, hbar)
        ora = st.moyal_series_oracle(f, g, f.degree + g.degree, pts, hbar)
        for (pp, qq), v, o in zip(pts, val, ora):
            err = abs(v - o)
            worst = max(worst, err)
            rows.append([fs, gs, pp, qq, v.real, v.imag, o.real, o.imag, err])
    header = ["f", "g", "p", "q", "re", "im", "oracle_re", "oracle_im", "abs_error"]
    return Result({"star_moyal": (header, rows)}, [at_most("max_abs_error", worst, p["tol"])])


@experiment("star-classical-limit", "star product tends to the pointwise product as hbar -> 0",
            hbars=[0.5, 0.25, 0.125], f="1 + p*q", g="q**2 - p", envelope_f=1.0, envelope_g=1.3,
            point=[0.3, -0.4], min_order=0.9, bracket_tol=0.1)
def _star_limit(p, seed):
    f = Observable.parse(p["f"], envelope=p["envelope_f"])
    g = Observable.parse(p["g"], envelope=p["envelope_g"])
    pt = np.asarray([p["point"]], float)
    fg = (f(*pt.T) * g(*pt.T))[0]
    # Poisson bracket {f, g} = f_q g_p - f_p g_q
    f0, fp, fq = f.with_gradient(*pt.T)
    g0, gp, gq = g.with_gradient(*pt.T)
    bracket = (fq * gp - fp * gq)[0]
    rows, errs = [], []
    for h in p["hbars"]:
        a = st.star(f, g, pt, h)[0]
        b = st.star(g, f, pt, h)[0]
        err = abs(a - fg)
        anti = (a - b) / (1j * h)
        errs.append(err)
        rows.append([h, a.real, a.imag, err, anti.real, anti.imag, abs(anti - bracket) / abs(bracket)])
    orders = [np.log2(errs[i] / errs[i + 1]) for i in range(len(errs) - 1)]
    checks = [Check("observed_order", min(orders), p["min_order"], bool(min(orders) >= p["min_order"]), ">="),
              at_most("bracket_rel_error_smallest_hbar", rows[-1][-1], p["bracket_tol"])]
    header = ["hbar", "star_re", "star_im", "abs_error_vs_product", "antisym_re", "antisym_im", "bracket_rel_error"]
    return Result({"classical_limit": (header, rows)}, checks, {"orders": orders})


@experiment("star-associativity", "grid star product is associative for enveloped quadratics",
            n=64, half_width=6.0, hbar=1.0, f="1 + p", g="q**2", h="p*q", envelopes=[1.2, 1.0, 1.1],
            tol=5e-3)
def _star_assoc(p, seed):
    spec = GridSpec(p["half_width"], p["n"])
    P, Q = spec.mesh()
    f, g, h = (Observable.parse(p[k], envelope=e)(P, Q) for k, e in zip("fgh", p["envelopes"]))
    left = st.star_grid(st.star_grid(f, g, spec, p["hbar"]), h, spec, p["hbar"])
    right = st.star_grid(f, st.star_grid(g, h, spec, p["hbar"]), spec, p["hbar"])
    inner = np.abs(P) <= p["half_width"] / 2
    inner &= np.abs(Q) <= p["half_width"] / 2
    err = _rel_masked(left, right, inner)
    return Result({"associativity": (["rel_error"], [[err]])}, [at_most("rel_error", err, p["tol"])])


# simplicial ------------------------------------------------------------------

@experiment("riemann-convergence", "generalized Riemann sums under barycentric refinement",
            levels=5, initial_pieces=8, tol_1d=2e-3, tol_area=1e-12)
def _riemann(p, seed):
    rows_1d = sx.converge(sx.left_point(lambda x: x * x), sx.uniform_interval(0, 1, p["initial_pieces"]),
                          p["levels"], 1 / 3)
    rows_2d = sx.converge(sx.signed_area(), sx.unit_square(), p["levels"], 1.0)
    res = Result()
    for key, rows in (("left_point_x2", rows_1d), ("square_area", rows_2d)):
        res.tables[key] = (["level", "simplex_count", "value_re", "value_im", "error"],
                           [[lv, cnt, v.real, v.imag, e] for lv, cnt, v, e in rows])
    res.checks += [at_most("left_point_final_error", rows_1d[-1][3], p["tol_1d"]),
                   at_most("area_max_error", max(r[3] for r in rows_2d), p["tol_area"])]
    errs = [r[3] for r in rows_1d]
    res.checks.append(Check("monotone_error", float(all(b < a for a, b in zip(errs, errs[1:]))), 1.0,
                            all(b < a for a, b in zip(errs, errs[1:])), "=="))
    return res


@experiment("stokes-pair", "closed pairs give triangulation-independent sums",
            triangulations=6, a=0.2, b=1.7, disk_radius=1.0, tol=1e-10)
def _stokes(p, seed):
    rng = np.random.default_rng(seed)
    a, b = p["a"], p["b"]
    pair = sx.ClosedPair(sx.exact_difference(np.sin), sx.zero_cochain(1))
    exact = np.sin(b) - np.sin(a)
    rows, lhs1 = [], []
    for k in range(p["triangulations"]):
        tri = sx.random_interval(rng, a, b, int(rng.integers(1, 12)))
        lhs, _ = sx.stokes_pair(pair, tri, exact)
        lhs1.append(lhs.real)
        rows.append(["interval", k, len(tri.simplices), lhs.real, exact, abs(lhs - exact)])
    form = _disk_form
    dpair, _ = sx.disk_circulation_pair(form, p["disk_radius"])
    circ = _disk_circulation(p["disk_radius"])
    lhs2 = []
    for k in range(p["triangulations"]):
        tri = sx.random_disk(rng, p["disk_radius"], int(rng.integers(8, 24)), int(rng.integers(5, 30)))
        lhs, _ = sx.stokes_pair(dpair, tri, circ)
        lhs2.append(lhs.real)
        rows.append(["disk", k, len(tri.simplices), lhs.real, circ, abs(lhs - circ)])
    checks = [at_most("interval_spread", np.ptp(lhs1), p["tol"]),
              at_most("interval_vs_exact", max(abs(v - exact) for v in lhs1), p["tol"]),
              at_most("disk_spread", np.ptp(lhs2), p["tol"]),
              at_most("disk_vs_circulation", max(abs(v - circ) for v in lhs2), p["tol"])]
    return Result({"stokes": (["domain", "trial", "simplices", "lhs", "reference", "abs_error"], rows)}, checks)


def _disk_form(x):
    """``(x y - y^3) dx + (x^2 y + x) dy``."""
    return np.stack([x[:, 0] * x[:, 1] - x[:, 1] ** 3, x[:, 0] ** 2 * x[:, 1] + x[:, 0]], axis=1)


def _disk_circulation(radius):
    """Integral of ``2 x y + 1 + 3 y^2 - x`` over the disk."""
    return np.pi * radius ** 2 + 3 * np.pi * radius ** 4 / 4


# stochastic ------------------------------------------------------------------

@experiment("ito-stratonovich", "midpoint minus left-point sums on Brownian paths",
            function="x", log2_steps=[4, 12], n_paths=10000, sigmas=3.0, noise_sigmas=2.0,
            expected_mean=0.5)
def _ito(p, seed):
    ns = [2 ** k for k in range(p["log2_steps"][0], p["log2_steps"][1] + 1)]
    rows = wn.correction_experiment(p["function"], ns, p["n_paths"], seed)
    checks = []
    if p["expected_mean"] is not None:
        worst = max(abs(r["mean_d"] - p["expected_mean"]) / r["se_d"] for r in rows)
        checks.append(at_most("mean_within_se", worst, p["sigmas"]))
    mono = all(b["l2_error"] < a["l2_error"] + p["noise_sigmas"] * np.hypot(a["stderr"], b["stderr"])
               for a, b in zip(rows, rows[1:]))
    checks.append(Check("l2_monotone", float(mono), 1.0, mono, "=="))
    rate = np.polyfit(np.log([r["n_steps"] for r in rows]), np.log([r["l2_error"] for r in rows]), 1)[0]
    header = ["n_steps", "estimate", "l2_error", "stderr", "n_paths", "seed", "estimate_se"]
    table = [[r["n_steps"], r["mean_d"], r["l2_error"], r["stderr"], r["n_paths"], r["seed"], r["se_d"]]
             for r in rows]
    return Result({"ito_stratonovich": (header, table)}, checks, {"l2_rate_exponent": rate})


@experiment("second-order", "two prescriptions with the same first and second derivatives agree",
            f="sin", g="x", log2_steps=[4, 10], n_paths=2000)
def _second(p, seed):
    ns = [2 ** k for k in range(p["log2_steps"][0], p["log2_steps"][1] + 1)]
    rows = wn.second_order_welldefined(wn.second_order(p["f"], p["g"]),
                                       wn.midpoint_second_order(p["f"], p["g"]), ns, p["n_paths"], seed)
    qv = wn.quadratic_variation(ns, p["n_paths"], seed)
    vals = [r["l2_difference"] for r in rows]
    dec = all(b < a for a, b in zip(vals, vals[1:]))
    qv_ok = max(abs(r["mean"] - 1) / r["se"] for r in qv)
    checks = [Check("l2_difference_decreasing", float(dec), 1.0, dec, "=="),
              at_most("quadratic_variation_mean_within_se", qv_ok, 3.0)]
    return Result({"second_order": (["n_steps", "l2_difference", "stderr", "n_paths", "seed"],
                                    [[r["n_steps"], r["l2_difference"], r["stderr"], r["n_paths"], r["seed"]]
                                     for r in rows]),
                   "quadratic_variation": (["n_steps", "mean", "se", "l2_to_one"],
                                           [[r["n_steps"], r["mean"], r["se"], r["l2_to_one"]] for r in qv])},
                  checks)


@experiment("smooth-path", "left-point and midpoint sums on smooth paths",
            functions=["x", "x^2", "sin", "gauss"], n_steps=4096, amplitude=1.0, tol=1e-6)
def _smooth(p, seed):
    rows, worst = [], 0.0
    for name in p["functions"]:
        gap, pred = wn.smooth_path_gap(name, p["n_steps"], amplitude=p["amplitude"])
        worst = max(worst, gap)
        rows.append([name, p["n_steps"], gap, pred])
    return Result({"smooth_path": (["function", "n_steps", "gap", "leading_order_prediction"], rows)},
                  [at_most("max_gap", worst, p["tol"])])
