"""The registered verification checks.

Each check takes a :class:`Context` and returns a :class:`CheckResult`.
Exponent checks are pass/fail at their stated tolerance; inequalities whose
constants are not fixed by the theory are logged as report-only values
inside the owning check.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..fitting import fit_exponent, window_stability, dyadic_windows
from ..geometry import distances_from, lp_norm
from ..harmonics import (
    build_basis,
    default_grid,
    highest_weight_harmonic,
    refined_sup_norm,
    zonal_harmonic,
)
from ..heat import (
    base_heat_kernel,
    check_3p,
    heat_kernel_grid,
    kato_modulus,
    picard_heat_kernel,
    picard_t0,
    required_degree,
    spectral_heat_kernel,
    two_sided_bound_report,
)
from ..nodal import (
    as_eigenpair,
    extract_nodal_set,
    gauss_green_residual,
    nodal_gradient_l1_check,
    nodal_gradient_l2_check,
)
from ..operators import (
    assemble_dtn,
    assemble_sqrt_laplacian,
    cluster_projector,
    dirichlet_kernel,
    envelope_constant,
    exact_norm_2_to_inf,
    lp_bump,
    multiplier_kernel,
    projector_from_vectors,
    resolvent_norm,
)
from ..potentials import make_potential
from ..solver import (
    default_solid,
    dirichlet_apriori_check,
    dyadic_extension_bound,
    dyadic_extension_norm,
    extension_of_coeffs,
    interior_boundary_ratio,
    sigma,
    solve_spectrum,
)
from .config import ExperimentConfig

__all__ = ["CheckResult", "Check", "Context", "REGISTRY", "InsufficientTruncation", "geometric_ints"]


class InsufficientTruncation(ValueError):
    """The configured truncation cannot reach the eigenvalues a check needs."""


@dataclass
class CheckResult:
    check_id: str
    title: str
    claim: str
    status: str  # pass | fail | report-only | errored | skipped
    measured: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)  # (x, measured, predicted, series)
    x_label: str = "lambda"
    runtime: float = 0.0
    notes: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"


@dataclass(frozen=True)
class Check:
    check_id: str
    title: str
    claim: str
    dims: tuple
    func: Callable


class Context:
    """Shared, immutable-after-build caches for one suite run."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self._bases = {}

    @property
    def dims(self):
        return self.config.dims()

    def degree(self, default: int) -> int:
        return self.config.max_degree if self.config.max_degree is not None else default

    def basis(self, dim: int, K: int):
        key = (dim, K)
        if key not in self._bases:
            self._bases[key] = build_basis(dim, K)
        return self._bases[key]

    @staticmethod
    def require(K: int, needed: float, what: str):
        if K < needed:
            raise InsufficientTruncation(f"{what} needs max_degree >= {int(np.ceil(needed))}, got {K}")


def geometric_ints(lo: float, hi: float, per_octave: int = 2):
    """Integers spaced geometrically from lo to hi inclusive."""
    num = int(np.ceil(per_octave * np.log2(hi / lo))) + 1
    return [int(v) for v in np.unique(np.round(np.geomspace(lo, hi, num)).astype(int))]


def _model(points, slope):
    """C lam^slope with C fitted by least squares at fixed slope."""
    pts = np.asarray(points, dtype=float)
    b = float(np.mean(np.log(pts[:, 1]) - slope * np.log(pts[:, 0])))
    return np.exp(b) * pts[:, 0] ** slope


def _rows(points, slope, series):
    pts = np.asarray(points, dtype=float)
    pred = _model(pts, slope) if slope is not None else [None] * len(pts)
    return [(float(x), float(y), None if q is None else float(q), series) for (x, y), q in zip(pts, pred)]


def _unit(basis, k, m=None):
    c = np.zeros(basis.num_modes)
    c[basis.index(k, k if m is None else m)] = 1.0
    return c


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


# ----------------------------------------------------------------------
def check_model_exactness(ctx: Context) -> CheckResult:
    K = ctx.degree(128)
    b = ctx.basis(1, K)
    sp = solve_spectrum(None, b)
    expected = np.concatenate([[0.0], np.repeat(np.arange(1, K + 1), 2)]).astype(float)
    err = float(np.abs(sp.values - expected).max())
    ref = ctx.config.nodal.refinement
    mismatches, rows = 0, []
    for e in sp:
        k = int(round(e.lam))
        count = extract_nodal_set(e, refinement=ref).zeros.size
        mismatches += count != 2 * k
        rows.append((e.lam, float(count), float(2 * k), "zero_count"))
    ok = err <= 1e-10 and mismatches == 0
    return CheckResult(
        "C01", "", "", _status(ok),
        {"max_degree": K, "spectrum_max_error": err, "zero_count_mismatches": mismatches, "eigenpairs": len(sp)},
        {"spectrum": 1e-10, "zero_count": "exact"}, rows,
    )


def check_ratio_law(ctx: Context) -> CheckResult:
    cfg = ctx.config.fit
    K = ctx.degree(int(cfg.lambda_max_circle))
    ctx.require(K, cfg.lambda_max_circle, "ratio law window")
    b = ctx.basis(1, K)
    solid = default_solid(b, 4)
    ks = geometric_ints(cfg.lambda_min, cfg.lambda_max_circle, per_octave=4)
    measured, rows, ok = {}, [], True
    for p in (2, 4):
        pts, err = [], 0.0
        for k in ks:
            prof = extension_of_coeffs(b, _unit(b, k), solid, p_list=(p,), deltas=())
            r = interior_boundary_ratio(prof, p)
            closed = (k * p + 2.0) ** (-1.0 / p)
            err = max(err, abs(r - closed) / closed)
            pts.append((k, r))
        fit = fit_exponent(pts)
        ok &= err <= 1e-6 and abs(fit.slope + 1.0 / p) <= 0.03
        measured[f"p{p}_closed_form_rel_error"] = err
        measured[f"p{p}_slope"] = fit.slope
        measured[f"p{p}_r_squared"] = fit.r_squared
        rows += _rows(pts, -1.0 / p, f"p={p}")
    return CheckResult("C02", "", "", _status(ok), measured, {"closed_form": 1e-6, "slope": 0.03}, rows)


def check_sup_exponents(ctx: Context) -> CheckResult:
    cfg = ctx.config.fit
    K = ctx.degree(int(cfg.lambda_max))
    ctx.require(K, cfg.lambda_max, "zonal window")
    b = ctx.basis(2, K)
    solid = default_solid(b, 6)
    ks = geometric_ints(cfg.lambda_min, cfg.lambda_max, per_octave=2)
    sup_pts, l6_pts, at_boundary = [], [], True
    for k in ks:
        c = b.analyze(zonal_harmonic(b, k))
        prof = extension_of_coeffs(b, c, solid, p_list=(6,), deltas=())
        bsup, _ = refined_sup_norm(b, c)
        isup = prof.interior_norm(np.inf)
        at_boundary &= isup <= bsup * (1 + 1e-9)
        lam = np.sqrt(k * (k + 1.0))
        l2 = float(np.linalg.norm(c))
        sup_pts.append((lam, max(isup, bsup) / l2))
        l6_pts.append((lam, prof.interior_norm(6) / l2))
    f_inf = fit_exponent(sup_pts)
    f_6 = fit_exponent(l6_pts)
    target_6 = -1.0 / 6.0 + sigma(6, 2)
    ok = abs(f_inf.slope - sigma(np.inf, 2)) <= 0.05 and f_6.slope <= target_6 + 0.05
    return CheckResult(
        "C03", "", "", _status(ok),
        {"max_degree": K, "slope_inf": f_inf.slope, "slope_p6": f_6.slope,
         "sup_attained_on_boundary": bool(at_boundary), "r_squared_inf": f_inf.r_squared},
        {"slope_inf": "0.5 +- 0.05", "slope_p6": "<= 0.05"},
        _rows(sup_pts, 0.5, "Linf(ball)") + _rows(l6_pts, target_6, "L6(ball)"),
    )


def check_l1_lower(ctx: Context) -> CheckResult:
    cfg = ctx.config.fit
    K = ctx.degree(int(cfg.lambda_max))
    ctx.require(K, cfg.lambda_max, "zonal window")
    b = ctx.basis(2, K)
    fine = b.with_grid(default_grid(2, K, oversample=2))
    ks = geometric_ints(cfg.lambda_min, cfg.lambda_max, per_octave=2)
    zon, hw = [], []
    for k in ks:
        lam = np.sqrt(k * (k + 1.0))
        cz = b.analyze(zonal_harmonic(b, k))
        vz = fine.synthesize(cz)
        zon.append((lam, lp_norm(vz, fine.grid, 1) / lp_norm(vz, fine.grid, 2)))
        vh = fine.synthesize(b.analyze(highest_weight_harmonic(b, k)))
        hw.append((lam, lp_norm(vh, fine.grid, 1) / lp_norm(vh, fine.grid, 2)))
    fz, fh = fit_exponent(zon), fit_exponent(hw)
    ok = abs(fz.slope + 0.25) <= 0.05
    return CheckResult(
        "C04", "", "", _status(ok),
        {"slope_zonal": fz.slope, "slope_highest_weight": fh.slope},
        {"slope_zonal": "-0.25 +- 0.05"},
        _rows(zon, -0.25, "zonal") + _rows(hw, -0.25, "highest_weight"),
        notes="zonal L1/L2 tends to a constant; the highest-weight family carries the -1/4 rate",
    )


def check_cluster_projector(ctx: Context) -> CheckResult:
    cfg = ctx.config.fit
    K = ctx.degree(int(cfg.lambda_max))
    ctx.require(K, cfg.lambda_max, "cluster window")
    b = ctx.basis(2, K)
    ks = geometric_ints(cfg.lambda_min, cfg.lambda_max, per_octave=2)
    D = assemble_dtn(b)
    err, free = 0.0, []
    for k in ks:
        v = exact_norm_2_to_inf(cluster_projector(D, k))
        exact = np.sqrt((2 * k + 1) / (4 * np.pi))
        err = max(err, abs(v - exact))
        free.append((k, v))
    W = ctx.config.cluster.window
    bl = ctx.basis(2, K + W)
    V = make_potential(f"random-lipschitz:seed={ctx.config.seed},lip=1.0", bl.grid)
    pert, sizes, resid = [], [], 0.0
    for k in ks:
        sp = solve_spectrum(V, bl, degree_window=(max(0, k - W), k + W), select=(k, k + 1))
        if len(sp) == 0:
            continue
        sizes.append(len(sp))
        resid = max(resid, float(sp.residuals.max()))
        pert.append((k, exact_norm_2_to_inf(projector_from_vectors(bl, sp.vectors))))
    fp = fit_exponent(pert)
    ok = err <= 1e-6 and fp.slope <= 0.6
    return CheckResult(
        "C05", "", "", _status(ok),
        {"free_max_abs_error": err, "lipschitz_slope": fp.slope, "window_half_width": W,
         "lipschitz_basis_degree": K + W, "cluster_sizes": sizes, "max_residual": resid},
        {"free": 1e-6, "lipschitz_slope": "<= 0.6"},
        _rows(free, 0.5, "V=0") + _rows(pert, 0.5, "V=lipschitz"),
    )


def check_resolvent(ctx: Context) -> CheckResult:
    K = ctx.degree(96)
    ctx.require(K, 64 + 16, "resolvent window")
    b = ctx.basis(2, K)
    A = assemble_sqrt_laplacian(b)
    lams = np.geomspace(8, 64, 7)
    pts, conv = [], True
    for lam in lams:
        est = resolvent_norm(A, float(lam), 6, seed=ctx.config.seed)
        conv &= est.converged
        pts.append((float(lam), est.value))
    f = fit_exponent(pts)
    ok = f.slope <= 1.0 / 6.0 + 0.1
    return CheckResult(
        "C06", "", "", _status(ok),
        {"slope": f.slope, "all_converged": bool(conv), "r_squared": f.r_squared},
        {"slope": "<= 1/6 + 0.1"}, _rows(pts, 1.0 / 6.0, "p=6"),
    )


def check_multiplier_kernel(ctx: Context) -> CheckResult:
    K = ctx.degree(128)
    ctx.require(K, 2**7, "bump at l = 6")
    b = ctx.basis(1, K)
    d = distances_from(b.grid, 0)
    consts, rows = {}, []
    for ell in range(3, 7):
        ker = multiplier_kernel(lp_bump(ell), 1.0, b, rows=[0])[0]
        C = envelope_constant(ker, d, 2.0**ell, 1, N=4)
        consts[ell] = C
        rows.append((float(ell), C, None, "envelope_constant"))
    vals = np.array(list(consts.values()))
    variation = float(vals.max() / vals.min() - 1.0)
    ones = multiplier_kernel(lambda s: np.ones_like(s), 1.0, b, rows=[0])[0]
    derr = float(np.abs(ones - dirichlet_kernel(K, d)).max())
    ok = variation < 0.5 and derr <= 1e-8
    return CheckResult(
        "C07", "", "", _status(ok),
        {"envelope_constants": {str(k): v for k, v in consts.items()}, "variation": variation,
         "dirichlet_max_error": derr},
        {"variation": "< 0.5", "dirichlet": 1e-8}, rows, x_label="ell",
    )


def check_nodal_measure(ctx: Context) -> CheckResult:
    cfg = ctx.config.fit
    ref = ctx.config.nodal.refinement
    measured, rows, ok = {}, [], True
    if 1 in ctx.dims:
        K = ctx.degree(int(cfg.lambda_max_circle) + 16)
        ctx.require(K, cfg.lambda_max_circle + 8, "nodal window on S^1")
        b = ctx.basis(1, K)
        sp = solve_spectrum(make_potential("cos-lowfreq", b.grid), b)
        pts = []
        for k in geometric_ints(cfg.lambda_min, cfg.lambda_max_circle, per_octave=4):
            i = int(np.argmin(np.abs(sp.values - k)))
            ns = extract_nodal_set(sp[i], refinement=ref)
            pts.append((sp.values[i], ns.measure))
        f1 = fit_exponent(pts)
        ok &= f1.slope >= 0.9
        measured["circle_slope"] = f1.slope
        rows += _rows(pts, 1.0, "S1 V=cos")
    if 2 in ctx.dims:
        K = ctx.degree(int(cfg.lambda_max))
        ctx.require(K, cfg.lambda_max, "zonal nodal window")
        pts = []
        for k in geometric_ints(cfg.lambda_min, cfg.lambda_max, per_octave=2):
            bk = build_basis(2, k)
            ns = extract_nodal_set(as_eigenpair(bk, bk.analyze(zonal_harmonic(bk, k))), refinement=ref)
            pts.append((np.sqrt(k * (k + 1.0)), ns.measure))
        f2 = fit_exponent(pts)
        b2 = build_basis(2, 2)
        L2 = extract_nodal_set(as_eigenpair(b2, b2.analyze(zonal_harmonic(b2, 2))), refinement=ref).measure
        exact = 4 * np.pi * np.sqrt(2.0 / 3.0)
        rel = abs(L2 - exact) / exact
        ok &= f2.slope >= 0.5 and rel <= 0.005
        measured.update({"sphere_slope": f2.slope, "k2_length": L2, "k2_rel_error": rel})
        rows += _rows(pts, 1.0, "S2 zonal")
    return CheckResult(
        "C08", "", "", _status(ok), measured,
        {"circle_slope": ">= 0.9", "sphere_slope": ">= 0.5", "k2_length": 0.005}, rows,
    )


def check_nodal_lemmas(ctx: Context) -> CheckResult:
    cfg = ctx.config.fit
    ref = ctx.config.nodal.refinement
    b8 = ctx.basis(1, 8)
    e = as_eigenpair(b8, np.sqrt(np.pi) * _unit(b8, 2), lam=2.0)
    ns = extract_nodal_set(e, refinement=ref)
    lhs, rhs = gauss_green_residual(e, ns)
    gg_err = max(abs(lhs - 16.0), abs(rhs - 16.0))
    K = ctx.degree(int(cfg.lambda_max_circle) + 16)
    ctx.require(K, cfg.lambda_max_circle + 8, "nodal lemma window")
    b = ctx.basis(1, K)
    ks = geometric_ints(cfg.lambda_min, cfg.lambda_max_circle, per_octave=4)
    r64, r65, rows = [], [], []
    for k in ks:
        ek = as_eigenpair(b, _unit(b, k), lam=float(k))
        nk = extract_nodal_set(ek, refinement=ref)
        a, c = nodal_gradient_l1_check(ek, nk)
        r64.append(a / c)
        r65.append(nodal_gradient_l2_check(ek, nk)[2])
        rows.append((float(k), r65[-1], 2.0 / np.pi, "grad_l2 pure"))
    e64 = float(np.abs(np.array(r64) - 2.0).max())
    e65 = float(np.abs(np.array(r65) - 2.0 / np.pi).max())
    # V = cos theta: constant of the nodal gradient lemma per dyadic window
    sp = solve_spectrum(make_potential("cos-lowfreq", b.grid), b)
    per_window = {}
    for lo, hi in dyadic_windows(cfg.lambda_min, cfg.lambda_max_circle):
        idx = np.flatnonzero((sp.values >= lo) & (sp.values < hi))
        vals = []
        for i in idx[:: max(1, idx.size // 8)]:
            ep = sp[i]
            nsi = extract_nodal_set(ep, refinement=ref)
            if nsi.regularity_flag:
                vals.append(nodal_gradient_l2_check(ep, nsi)[2])
                rows.append((ep.lam, vals[-1], None, "grad_l2 V=cos"))
        if vals:
            per_window[f"{lo:g}-{hi:g}"] = float(np.mean(vals))
    w = np.array(list(per_window.values()))
    spread = float(w.max() / w.min() - 1.0) if w.size else float("inf")
    ok = gg_err <= 1e-8 and e64 <= 1e-8 and e65 <= 1e-6 and spread <= 0.3
    return CheckResult(
        "C09", "", "", _status(ok),
        {"gauss_green_lhs": lhs, "gauss_green_rhs": rhs, "grad_l1_ratio_max_error": e64,
         "grad_l2_pure_max_error": e65, "grad_l2_cos_window_constants": per_window, "grad_l2_cos_spread": spread},
        {"gauss_green": 1e-8, "grad_l1": 1e-8, "grad_l2": 1e-6, "spread": "<= 0.3"}, rows,
    )


def check_heat(ctx: Context) -> CheckResult:
    hc = ctx.config.heat
    t = hc.picard_t
    Kp = required_degree(1.0, t)
    b = ctx.basis(1, Kp)
    measured, rows = {}, []
    c = 0.7
    Vc = make_potential(f"constant:{c}", b.grid)
    Pc = picard_heat_kernel(Vc, 1.0, b, t)
    e_const = float(np.abs(Pc.kernel - np.exp(-c * t) * base_heat_kernel(1.0, b, t)).max())
    Vcos = make_potential("cos-lowfreq", b.grid)
    Pk = picard_heat_kernel(Vcos, 1.0, b, t)
    e_cos = float(np.abs(Pk.kernel - spectral_heat_kernel(Vcos, 1.0, b, t)).max())
    t0, ratios = picard_t0(Vcos, 1.0, b, [2.0**-j for j in range(hc.t_max_exp, -1, -1)])
    contraction_ok = t0 is not None and all(r <= 1 / 3 for tt, r in ratios.items() if tt <= t0)
    for tt, r in sorted(ratios.items()):
        rows.append((tt, float(r), 1.0 / 3.0, "picard_contraction"))
    measured.update({"const_max_error": e_const, "cos_max_error": e_cos, "t0": t0,
                     "contraction_ratios": {f"{k:g}": float(v) for k, v in ratios.items()},
                     "picard_panels": Pk.panels, "picard_iterations": Pk.iterations})
    three = {}
    stable3 = True
    for a in ctx.config.alpha:
        r = check_3p(a, 1, 100_000, seed=ctx.config.seed)
        r2 = check_3p(a, 1, 200_000, seed=ctx.config.seed)
        st = abs(r2.constant - r.constant) <= 0.1 * r.constant and r.stable and np.isfinite(r.constant)
        stable3 &= st
        three[f"{a:g}"] = {"constant": r.constant, "doubled": r2.constant}
        rows.append((a, r.constant, 2 ** (1 / a - 1), "3P constant (x=alpha)"))
    measured["three_p"] = three
    times = hc.times
    Kt = required_degree(1.0, min(times))
    sups, infs = [], []
    for over in (1, 2):
        bb = build_basis(1, Kt)
        if over == 2:
            bb = bb.with_grid(default_grid(1, Kt, oversample=2))
        step = max(1, bb.grid.size // 16)
        kg = heat_kernel_grid(None, 1.0, bb, times, rows=np.arange(0, bb.grid.size, step))
        s, i = two_sided_bound_report(kg)
        sups.append(s)
        infs.append(i)
    two_ok = True
    for tt in times:
        s0, s1, i0, i1 = sups[0][tt], sups[1][tt], infs[0][tt], infs[1][tt]
        two_ok &= i0 > 0 and np.isfinite(s0)
        two_ok &= abs(s1 - s0) <= 0.25 * s0 and abs(i1 - i0) <= 0.25 * i0
        rows.append((tt, s0, None, "sup p/q"))
        rows.append((tt, i0, None, "inf p/q"))
    measured["two_sided"] = {f"{tt:g}": {"sup": sups[0][tt], "inf": infs[0][tt],
                                          "sup_doubled": sups[1][tt], "inf_doubled": infs[1][tt]} for tt in times}
    km = kato_modulus(Vcos, 1.0, times)
    measured["kato_modulus_cos"] = {f"{tt:g}": float(v) for tt, v in zip(km.times, km.values)}
    ok = e_const <= 1e-6 and e_cos <= 1e-4 and contraction_ok and stable3 and two_ok
    return CheckResult(
        "C10", "", "", _status(ok), measured,
        {"const": 1e-6, "cos": 1e-4, "contraction": "<= 1/3 for t <= t0", "3P": "+-10%", "two_sided": "+-25%"},
        rows, x_label="t",
    )


def check_dirichlet_apriori(ctx: Context) -> CheckResult:
    K = ctx.degree(64)
    b = ctx.basis(1, K)
    solid = default_solid(b, 2)
    worst_err, worst_pure, rows = 0.0, 0.0, []
    for k in range(0, K + 1):
        u, h = dirichlet_apriori_check(_unit(b, k), b, solid)
        closed = np.sqrt(np.sqrt(1.0 + k * k) / (2.0 * k + 2.0))
        worst_err = max(worst_err, abs(u / h - closed))
        worst_pure = max(worst_pure, u / h)
        rows.append((float(k), u / h, closed, "pure"))
    rng = np.random.default_rng(ctx.config.seed)
    rand = []
    for _ in range(100):
        f = rng.standard_normal(b.num_modes) / (1.0 + b.degrees)
        u, h = dirichlet_apriori_check(f, b, solid)
        rand.append(u / h)
    ok = worst_pure <= 1.0 + 1e-12 and worst_err <= 1e-8 and max(rand) <= 1.0 + 1e-12
    return CheckResult(
        "C11", "", "", _status(ok),
        {"pure_max_ratio": worst_pure, "pure_closed_form_error": worst_err,
         "random_max_ratio": max(rand), "random_min_ratio": min(rand)},
        {"ratio": "<= 1", "closed_form": 1e-8}, rows,
    )


def check_dyadic_extension(ctx: Context) -> CheckResult:
    K = ctx.degree(128)
    ctx.require(K, 2**7, "dyadic band l = 6")
    b = ctx.basis(1, K)
    ells = np.arange(3, 7)
    measured, rows, ok = {}, [], True
    rng = np.random.default_rng(ctx.config.seed)
    noise = rng.standard_normal((4, b.num_modes))
    for p in (2, 4):
        solid = default_solid(b, p)
        sup_vals, noise_vals = [], []
        for ell in ells:
            v, conv, _ = dyadic_extension_norm(int(ell), p, b, solid, seed=ctx.config.seed)
            sup_vals.append(v)
            noise_vals.append(max(dyadic_extension_bound(f, int(ell), p, b, solid) for f in noise))
        slope = float(np.polyfit(ells, np.log2(sup_vals), 1)[0])
        nslope = float(np.polyfit(ells, np.log2(noise_vals), 1)[0])
        ok &= slope <= -1.0 / p + 0.05
        measured[f"p{p}_slope"] = slope
        measured[f"p{p}_white_noise_slope"] = nslope
        for ell, v, w in zip(ells, sup_vals, noise_vals):
            rows.append((float(ell), v, 2.0 ** (-float(ell) / p) * sup_vals[0] * 2.0 ** (3.0 / p), f"p={p} sup"))
            rows.append((float(ell), w, None, f"p={p} white noise"))
    return CheckResult("C12", "", "", _status(ok), measured, {"slope": "<= -1/p + 0.05"}, rows, x_label="ell")


# ----------------------------------------------------------------------
_SPECS = [
    ("C01", "model exactness", "DtN spectrum on the disk is {0,1,1,...,K,K}; k-th cluster eigenfunctions have 2k zeros", (1,), check_model_exactness),
    ("C02", "interior/boundary ratio law", "||u||_Lp(ball)/||f||_Lp(sphere) = (kp+n+1)^(-1/p) for pure modes; slope -1/p", (1,), check_ratio_law),
    ("C03", "interior Lp exponents", "zonal sup slope sigma(inf) = 1/2 with the sup on the boundary; L6(ball) slope <= -1/6 + sigma(6)", (2,), check_sup_exponents),
    ("C04", "L1 lower bound", "zonal ||e||_1/||e||_2 slope -(n-1)/4", (2,), check_l1_lower),
    ("C05", "cluster projector bound", "||chi_[k,k+1)||_(2->inf) = sqrt((2k+1)/4pi) for V=0; slope <= 1/2 for Lipschitz V", (2,), check_cluster_projector),
    ("C06", "resolvent exponent", "L2->L6 norm of (sqrt(-Delta)-(lambda+i))^-1 grows at most like lambda^(1/6)", (2,), check_resolvent),
    ("C07", "multiplier kernel decay", "beta_l kernel envelope constant for N=4 independent of l; m=1 gives the Dirichlet kernel", (1,), check_multiplier_kernel),
    ("C08", "nodal measure", "nodal measure grows at least like lambda^((3-n)/2)", (1, 2), check_nodal_measure),
    ("C09", "Gauss-Green and nodal lemmas", "Gauss-Green identity on nodal domains; nodal gradient integrals against lambda powers", (1,), check_nodal_lemmas),
    ("C10", "heat kernel suite", "Picard construction, 3P inequality and two-sided q_alpha bounds for the fractional heat kernel", (1,), check_heat),
    ("C11", "Dirichlet a-priori bound", "||u||_L2(ball) <= ||f||_H^(-1/2)(sphere)", (1,), check_dirichlet_apriori),
    ("C12", "dyadic extension bound", "||T_H beta_l(P)||_(Lp->Lp(ball)) decays like 2^(-l/p)", (1,), check_dyadic_extension),
]

REGISTRY = {cid: Check(cid, title, claim, dims, fn) for cid, title, claim, dims, fn in _SPECS}


def run_check(check: Check, ctx: Context) -> CheckResult:
    """Run one check with error capture and timing."""
    t0 = time.perf_counter()
    try:
        res = check.func(ctx)
    except Exception as exc:  # captured per check so the suite continues
        res = CheckResult(check.check_id, "", "", "errored", notes=f"{type(exc).__name__}: {exc}")
    res.check_id, res.title, res.claim = check.check_id, check.title, check.claim
    res.runtime = time.perf_counter() - t0
    return res
