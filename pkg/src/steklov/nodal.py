"""Nodal sets of boundary eigenfunctions and the nodal integral identities.

On S^1 the nodal set is a finite set of zeros, found by bracketing sign
changes on an oversampled grid and bisecting.  On S^2 it is a union of
curves, traced by marching squares on an oversampled colatitude/longitude
grid; lengths use great-circle segments.

Integrals over nodal domains on S^1 are done interval by interval with
Gauss-Legendre, which is exact to rounding for the smooth integrands.  On
S^2 they use sign masks on the oversampled grid.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import map_coordinates
from scipy.optimize import brentq
from scipy.special import roots_legendre
from skimage.measure import find_contours

from .fitting import ExponentFit, fit_exponent
from .harmonics import HarmonicBasis
from .solver import Eigenpair

__all__ = [
    "NodalSet",
    "as_eigenpair",
    "extract_nodal_set",
    "nodal_measure_exponent",
    "gauss_green_residual",
    "nodal_gradient_l1_check",
    "nodal_gradient_l2_check",
    "REGULARITY_THRESHOLD",
]

REGULARITY_THRESHOLD = 1e-6


@dataclass(frozen=True)
class NodalSet:
    """Zero set of a real eigenfunction.

    n=1: ``zeros`` (sorted angles) and ``gradients`` e'(zero).
    n=2: ``segments`` (S, 2, 2) of (colatitude, longitude) endpoints with
    ``lengths`` and midpoint ``gradients`` |grad e|.
    ``measure`` is the zero count (n=1) or total length (n=2).
    """

    dim: int
    measure: float
    regularity_flag: bool
    min_gradient: float
    grad_sup: float
    refinement: int
    zeros: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)
    gradients: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)
    segments: np.ndarray = field(default_factory=lambda: np.empty((0, 2, 2)), repr=False)
    lengths: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)
    # fine-grid data reused by the domain integrals on S^2
    _grid: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def is_empty(self) -> bool:
        return self.measure == 0


def as_eigenpair(basis: HarmonicBasis, coeffs, lam: float | None = None) -> Eigenpair:
    """Wrap a coefficient vector as an Eigenpair (lam defaults to its mean degree)."""
    c = np.asarray(coeffs, dtype=float)
    if lam is None:
        w = c**2
        lam = float(np.sum(w * basis.degrees) / np.sum(w)) if w.sum() > 0 else 0.0
    return Eigenpair(float(lam), c, -1, float("nan"), basis)


def _circle_grid(K, refinement):
    N = refinement * (2 * K + 2)
    return 2.0 * np.pi * np.arange(N) / N


def _sphere_fine(K, refinement):
    nlat = refinement * (K + 1)
    th = (np.arange(nlat) + 0.5) * np.pi / nlat
    ph = 2.0 * np.pi * np.arange(2 * nlat) / (2 * nlat)
    return th, ph


def extract_nodal_set(e: Eigenpair, refinement: int = 8) -> NodalSet:
    """Locate the nodal set of ``e`` on an evaluation grid oversampled by ``refinement``.

    Raises
    ------
    ValueError
        If ``refinement < 4`` or e vanishes identically.
    """
    if refinement < 4:
        raise ValueError("refinement must be >= 4")
    basis, c = e.basis, np.asarray(e.coefficients, dtype=float)
    if not np.any(c != 0):
        raise ValueError("eigenfunction vanishes identically")
    if basis.dim == 1:
        return _nodal_circle(basis, c, refinement)
    return _nodal_sphere(basis, c, refinement)


def _nodal_circle(basis, c, refinement):
    K = basis.max_degree
    th = _circle_grid(K, refinement)
    v = basis.evaluate(c, th)
    dv = basis.evaluate_derivatives(c, th, order=1)
    gsup = float(np.abs(dv).max())
    scale = float(np.abs(v).max())

    def f(t):
        return float(basis.evaluate(c, np.array([np.mod(t, 2.0 * np.pi)]))[0])

    # values this small are treated as exact zeros of the sampled function
    tiny = 1e-14 * scale
    s = np.where(np.abs(v) <= tiny, 0.0, np.sign(v))
    N = th.size
    zeros = []
    h = 2.0 * np.pi / N
    for i in range(N):
        a, b = s[i], s[(i + 1) % N]
        if a * b < 0:
            lo = th[i]
            fa, fb = f(lo), f(lo + h)
            if fa * fb < 0:
                zeros.append(brentq(f, lo, lo + h, xtol=1e-14, rtol=4 * np.finfo(float).eps))
            else:
                # rounding disagrees with the grid signs: keep the smaller endpoint
                zeros.append(lo if abs(fa) <= abs(fb) else lo + h)
        elif a == 0 and s[i - 1] * b < 0:
            zeros.append(th[i])
    z = np.sort(np.mod(np.array(zeros), 2.0 * np.pi))
    if z.size > 1:
        z = z[np.concatenate([[True], np.diff(z) > 1e-10])]
    g = basis.evaluate_derivatives(c, z, order=1) if z.size else np.empty(0)
    gmin = float(np.abs(g).min()) if z.size else float("inf")
    regular = bool(gmin >= REGULARITY_THRESHOLD * gsup) if z.size else True
    return NodalSet(1, float(z.size), regular, gmin, gsup, refinement, zeros=z, gradients=g)


def _great_circle(a, b):
    """Geodesic length between (colat, lon) points, row-wise."""
    def xyz(p):
        st = np.sin(p[:, 0])
        return np.column_stack([st * np.cos(p[:, 1]), st * np.sin(p[:, 1]), np.cos(p[:, 0])])

    u, v = xyz(a), xyz(b)
    return np.arctan2(np.linalg.norm(np.cross(u, v), axis=1), np.sum(u * v, axis=1))


def _sphere_fields(basis, c, th, ph):
    E = basis.evaluate(c, th, ph)
    et, ep = basis.evaluate_derivatives(c, th, ph, order=1)
    st = np.sin(th)[:, None]
    grad = np.sqrt(et**2 + (ep / st) ** 2)
    return E, et, ep, grad


def _nodal_sphere(basis, c, refinement):
    K = basis.max_degree
    th, ph = _sphere_fine(K, refinement)
    E, et, ep, grad = _sphere_fields(basis, c, th, ph)
    nlat, nlon = E.shape
    # periodic pad in longitude so contours close across phi = 0
    Ep = np.concatenate([E, E[:, :1]], axis=1)
    Gp = np.concatenate([grad, grad[:, :1]], axis=1)
    dth, dph = np.pi / nlat, 2.0 * np.pi / nlon
    segs, mids = [], []
    for cont in find_contours(Ep, 0.0):
        if cont.shape[0] < 2:
            continue
        a, b = cont[:-1], cont[1:]
        segs.append(np.stack([a, b], axis=1))
        mids.append(0.5 * (a + b))
    if segs:
        idx_segs = np.concatenate(segs)
        mid = np.concatenate(mids)
        to_angles = lambda q: np.column_stack([(q[:, 0] + 0.5) * dth, q[:, 1] * dph])
        A, B = to_angles(idx_segs[:, 0]), to_angles(idx_segs[:, 1])
        lengths = _great_circle(A, B)
        gmid = map_coordinates(Gp, mid.T, order=1, mode="nearest")
        segments = np.stack([A, B], axis=1)
    else:
        lengths = np.empty(0)
        gmid = np.empty(0)
        segments = np.empty((0, 2, 2))
    # exclude one row at each pole from the gradient bookkeeping
    gsup = float(grad[1:-1].max())
    gmin = float(gmid.min()) if gmid.size else float("inf")
    regular = bool(gmin >= REGULARITY_THRESHOLD * gsup) if gmid.size else True
    cache = {"theta": th, "phi": ph, "E": E, "et": et, "ep": ep, "grad": grad}
    return NodalSet(
        2, float(lengths.sum()), regular, gmin, gsup, refinement,
        gradients=gmid, segments=segments, lengths=lengths, _grid=cache,
    )


# ----------------------------------------------------------------------
def nodal_measure_exponent(samples, window=None) -> ExponentFit:
    """Slope of log |N_lambda| against log lambda.

    ``samples`` holds (lambda, NodalSet or measure) pairs.
    """
    pts = []
    for lam, ns in samples:
        m = ns.measure if isinstance(ns, NodalSet) else float(ns)
        pts.append((lam, m))
    return fit_exponent(pts, window)


def _interval_nodes(a, b, npts):
    x, w = roots_legendre(npts)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


def _domain_pieces(e, nodal, npts):
    """Gauss-Legendre nodes/weights and signs of e for each nodal interval on S^1."""
    basis, c = e.basis, e.coefficients
    z = nodal.zeros
    if z.size == 0:
        t, w = _interval_nodes(0.0, 2.0 * np.pi, npts)
        sgn = np.sign(basis.evaluate(c, np.array([np.pi]))[0])
        return [(t, w, sgn)]
    ends = np.append(z, z[0] + 2.0 * np.pi)
    out = []
    for a, b in zip(ends[:-1], ends[1:]):
        t, w = _interval_nodes(a, b, npts)
        sgn = np.sign(basis.evaluate(c, np.array([0.5 * (a + b)]))[0])
        out.append((t, w, sgn))
    return out


def _weight_and_div_circle(basis, c, t, f_choice):
    d1 = basis.evaluate_derivatives(c, t, order=1)
    d2 = basis.evaluate_derivatives(c, t, order=2)
    if f_choice == "one":
        return np.ones_like(t), d2
    f = np.sqrt(1.0 + d1**2)
    # (f e')' = f e'' + e' f' with f' = e' e'' / f
    return f, f * d2 + d1 * (d1 * d2 / f)


def _sphere_div(basis, c, nodal, f_choice):
    g = nodal._grid
    th, ph = g["theta"], g["phi"]
    lap = basis.evaluate(-basis.laplace_eigenvalue * c, th, ph)
    if f_choice == "one":
        return np.ones_like(lap), lap
    et, ep, grad = g["et"], g["ep"], g["grad"]
    ett, etp, epp = basis.evaluate_derivatives(c, th, ph, order=2)
    st = np.sin(th)[:, None]
    cot = (np.cos(th) / np.sin(th))[:, None]
    # covariant Hessian in the orthonormal frame (theta, phi/sin theta)
    h11 = ett
    h12 = (etp - cot * ep) / st
    h22 = epp / st**2 + cot * et
    g1, g2 = et, ep / st
    hess_gg = h11 * g1 * g1 + 2 * h12 * g1 * g2 + h22 * g2 * g2
    f = np.sqrt(1.0 + grad**2)
    return f, f * lap + hess_gg / f


def _f_choice(f_choice):
    if f_choice not in ("one", "grad_weight"):
        raise ValueError("f_choice must be 'one' or 'grad_weight'")


def gauss_green_residual(e: Eigenpair, nodal: NodalSet, f_choice: str = "one"):
    """Both sides of 2 int_N f|grad e| = int_{D-} div(f grad e) - int_{D+} div(f grad e).

    Returns ``(lhs, rhs)``.  ``f_choice`` is ``'one'`` or ``'grad_weight'``
    (f = sqrt(1 + |grad e|^2)).
    """
    _f_choice(f_choice)
    if not nodal.regularity_flag:
        raise ValueError("zero is not a regular value at this resolution")
    basis, c = e.basis, e.coefficients
    if basis.dim == 1:
        if nodal.zeros.size:
            fz, _ = _weight_and_div_circle(basis, c, nodal.zeros, f_choice)
            lhs = 2.0 * float(np.sum(fz * np.abs(nodal.gradients)))
        else:
            lhs = 0.0
        npts = max(32, 2 * basis.max_degree + 8)
        rhs = 0.0
        for t, w, sgn in _domain_pieces(e, nodal, npts):
            _, div = _weight_and_div_circle(basis, c, t, f_choice)
            rhs -= sgn * float(w @ div)
        return lhs, rhs
    f, div = _sphere_div(basis, c, nodal, f_choice)
    g = nodal._grid
    th = g["theta"]
    nlat, nlon = g["E"].shape
    area = (np.sin(th) * (np.pi / nlat))[:, None] * (2.0 * np.pi / nlon)
    sgn = np.sign(g["E"])
    rhs = -float(np.sum(sgn * div * area))
    if nodal.lengths.size:
        if f_choice == "one":
            fw = np.ones_like(nodal.gradients)
        else:
            fw = np.sqrt(1.0 + nodal.gradients**2)
        lhs = 2.0 * float(np.sum(fw * nodal.gradients * nodal.lengths))
    else:
        lhs = 0.0
    return lhs, rhs


def _l1_norm(e, nodal):
    basis, c = e.basis, e.coefficients
    if basis.dim == 1:
        npts = max(32, 2 * basis.max_degree + 8)
        return float(sum(sgn * (w @ basis.evaluate(c, t)) for t, w, sgn in _domain_pieces(e, nodal, npts)))
    g = nodal._grid
    nlat, nlon = g["E"].shape
    area = (np.sin(g["theta"]) * (np.pi / nlat))[:, None] * (2.0 * np.pi / nlon)
    return float(np.sum(np.abs(g["E"]) * area))


def _nodal_integral(nodal, power):
    if nodal.dim == 1:
        return float(np.sum(np.abs(nodal.gradients) ** power))
    return float(np.sum(nodal.gradients**power * nodal.lengths))


def nodal_gradient_l1_check(e: Eigenpair, nodal: NodalSet, lam: float | None = None):
    """(int_N |grad e|, lam^2/4 ||e||_1)."""
    if not nodal.regularity_flag:
        raise ValueError("zero is not a regular value at this resolution")
    lam = e.lam if lam is None else lam
    return _nodal_integral(nodal, 1), lam**2 / 4.0 * _l1_norm(e, nodal)


def nodal_gradient_l2_check(e: Eigenpair, nodal: NodalSet, lam: float | None = None):
    """(int_N |grad e|^2, lam^3 ||e||_2, ratio)."""
    if not nodal.regularity_flag:
        raise ValueError("zero is not a regular value at this resolution")
    lam = e.lam if lam is None else lam
    lhs = _nodal_integral(nodal, 2)
    rhs = lam**3 * float(np.linalg.norm(e.coefficients))
    return lhs, rhs, (lhs / rhs if rhs > 0 else float("nan"))
