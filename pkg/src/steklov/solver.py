"""Steklov spectra of D + V, harmonic extension and interior norms.

Eigenfunctions are computed in the harmonic basis of the boundary.  The
harmonic extension of a boundary function sum_k f_k (degree-k parts) is
sum_k r^k f_k, which is exact on the disk/ball, so interior norms reduce
to a radial Gauss-Jacobi rule times the boundary quadrature.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .geometry import (
    QuadratureGrid,
    SolidGrid,
    lp_norm,
    make_solid_grid,
    solid_lp_norm_of_values,
)
from .harmonics import HarmonicBasis, default_grid
from .operators import (
    BoundaryOperator,
    assemble_dtn,
    assemble_multiplication,
    lp_bump,
    composite,
)
from .potentials import PotentialField

__all__ = [
    "sigma",
    "critical_exponent",
    "Eigenpair",
    "Spectrum",
    "solve_spectrum",
    "ExtensionProfile",
    "extend_harmonically",
    "extension_of_coeffs",
    "interior_boundary_ratio",
    "interior_decay_profile",
    "DecayProfile",
    "dyadic_extension_bound",
    "dyadic_extension_norm",
    "dirichlet_apriori_check",
    "h_minus_half_norm",
]


def critical_exponent(n: int) -> float:
    """p_c = 2(n+1)/(n-1); infinite on the circle."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.inf if n == 1 else 2.0 * (n + 1) / (n - 1)


def sigma(p: float, n: int) -> float:
    """Critical exponent law sigma(p) for L^2-normalised eigenfunctions on an n-manifold.

    Parameters
    ----------
    p : float
        Lebesgue exponent, 2 <= p <= inf.
    n : int
        Dimension of the boundary manifold.

    Returns
    -------
    float
        (n-1)/2 (1/2 - 1/p) for p <= p_c and (n-1)/2 - n/p beyond; both
        branches agree at p_c.  On the circle sigma vanishes identically.
    """
    if not p >= 2:
        raise ValueError(f"sigma needs p >= 2, got {p}")
    if n == 1:
        return 0.0
    pc = critical_exponent(n)
    inv = 0.0 if p == np.inf else 1.0 / p
    if p < pc:
        return (n - 1) / 2.0 * (0.5 - inv)
    return (n - 1) / 2.0 - n * inv


# ----------------------------------------------------------------------
@dataclass(frozen=True)
class Eigenpair:
    """One eigenpair of D + V with coefficients in the full basis."""

    lam: float
    coefficients: np.ndarray = field(repr=False)
    index: int
    residual: float
    basis: HarmonicBasis = field(repr=False)
    tail_energy: float = 0.0
    contaminated: bool = False

    def values(self, grid: QuadratureGrid | None = None) -> np.ndarray:
        """Nodal values on ``grid`` (default: the basis grid)."""
        if grid is None or grid is self.basis.grid:
            return self.basis.synthesize(self.coefficients)
        return self.basis.with_grid(grid).synthesize(self.coefficients)

    @property
    def degree_energy(self) -> np.ndarray:
        """Energy per degree, length K + 1."""
        return np.bincount(
            self.basis.degrees, weights=self.coefficients**2, minlength=self.basis.max_degree + 1
        )


@dataclass
class Spectrum:
    """Eigenvalues (ascending) and eigenvectors of D + V.

    ``vectors`` has one column per kept eigenpair, expressed in the full
    basis even when the solve was restricted to a degree window.
    """

    basis: HarmonicBasis
    values: np.ndarray
    vectors: np.ndarray = field(repr=False)
    residuals: np.ndarray = field(repr=False)
    tail_energy: np.ndarray = field(repr=False)
    tail_tol: float = 1e-6
    window: Optional[tuple] = None
    potential: Optional[PotentialField] = field(default=None, repr=False)

    def __len__(self):
        return self.values.size

    def __getitem__(self, i) -> Eigenpair:
        i = range(len(self))[i]
        return Eigenpair(
            float(self.values[i]),
            self.vectors[:, i].copy(),
            i,
            float(self.residuals[i]),
            self.basis,
            float(self.tail_energy[i]),
            bool(self.tail_energy[i] >= self.tail_tol),
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def contaminated(self) -> np.ndarray:
        return self.tail_energy >= self.tail_tol

    def cluster(self, lam: float, width: float = 1.0) -> np.ndarray:
        """Indices with eigenvalue in [lam, lam + width)."""
        return np.flatnonzero((self.values >= lam) & (self.values < lam + width))

    def cluster_vectors(self, lam: float, width: float = 1.0) -> np.ndarray:
        return self.vectors[:, self.cluster(lam, width)]


def _apply_dv(basis, V, C):
    """(D + V) applied to columns of C via exact multiplication on the grid."""
    out = C * basis.degrees[:, None].astype(float)
    if V is not None and not np.all(V.values == 0):
        if V.grid is basis.grid:
            vals, work = V.values, basis
        else:
            grid = default_grid(basis.dim, basis.max_degree + (V.max_degree or 0), oversample=1)
            vals, work = V.on_grid(grid).values, basis.with_grid(grid)
        out = out + work.analyze(work.synthesize(C.T) * vals).T
    return out


def solve_spectrum(
    V: PotentialField | None,
    basis: HarmonicBasis,
    *,
    degree_window: Optional[tuple] = None,
    select: Optional[tuple] = None,
    tail_tol: float = 1e-6,
) -> Spectrum:
    """Symmetric eigendecomposition of D + V in ``basis``.

    Parameters
    ----------
    V : PotentialField or None
        Potential; ``None`` means V = 0.
    basis : HarmonicBasis
    degree_window : (lo, hi), optional
        Restrict the Galerkin space to degrees lo..hi.  Only eigenpairs away
        from the window edges are trustworthy; their tail energy (energy in
        the top 10% of the window's degrees) is reported.  Exact for V = 0.
    select : (a, b), optional
        Keep eigenvalues in [a, b).
    tail_tol : float
        Eigenpairs with more than this fraction of energy in the top 10% of
        retained degrees are flagged as contaminated by truncation.

    Returns
    -------
    Spectrum
        Eigenvalues ascending; residuals ||(D+V)e - lam e||_2 computed
        with the multiplication by V done on the grid (not the truncated
        matrix), so they also expose truncation error.
    """
    lo, hi = (0, basis.max_degree) if degree_window is None else degree_window
    lo, hi = max(int(lo), 0), min(int(hi), basis.max_degree)
    idx = np.flatnonzero((basis.degrees >= lo) & (basis.degrees <= hi))
    if idx.size == 0:
        raise ValueError("empty degree window")
    zero = V is None or np.all(V.values == 0)
    d = basis.degrees[idx].astype(float)
    if zero:
        order = np.argsort(d, kind="stable")
        w = d[order]
        sub = np.zeros((idx.size, idx.size))
        sub[order, np.arange(idx.size)] = 1.0
    else:
        if degree_window is None:
            A = composite(assemble_dtn(basis), assemble_multiplication(V, basis)).matrix
        else:
            A = _windowed_matrix(V, basis, idx) + np.diag(d)
        try:
            w, sub = np.linalg.eigh(A)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
            raise RuntimeError(f"eigensolve failed: {exc}") from exc
    if select is not None:
        keep = (w >= select[0]) & (w < select[1])
        w, sub = w[keep], sub[:, keep]
    vecs = np.zeros((basis.num_modes, w.size))
    vecs[idx] = sub
    top = hi - max(1, int(np.ceil(0.1 * (hi - lo + 1)))) + 1
    tail_rows = basis.degrees[idx] >= top
    if hi == basis.max_degree and degree_window is None:
        tail = np.sum(sub[tail_rows] ** 2, axis=0)
    else:
        # a window has two artificial edges
        bot = lo + max(1, int(np.ceil(0.1 * (hi - lo + 1)))) - 1
        edge = tail_rows | ((basis.degrees[idx] <= bot) & (lo > 0))
        tail = np.sum(sub[edge] ** 2, axis=0)
    if zero:
        # D is diagonal, so truncation cannot couple modes: nothing to flag
        res = np.zeros(w.size)
        tail = np.zeros(w.size)
    else:
        R = _apply_dv(basis, V, vecs) - vecs * w
        res = np.linalg.norm(R, axis=0)
    return Spectrum(basis, w, vecs, res, tail, tail_tol, (lo, hi), V)


def _windowed_matrix(V: PotentialField, basis: HarmonicBasis, idx):
    """<Y_i, V Y_j> for i, j in ``idx`` by quadrature on an adequate grid."""
    need = 2 * basis.max_degree + (V.max_degree or 0)
    if V.grid is basis.grid and basis.grid.exactness_degree >= need:
        work, vals = basis, V.values
    else:
        grid = default_grid(basis.dim, (need + 1) // 2)
        work, vals = basis.with_grid(grid), V.on_grid(grid).values
    M = basis.num_modes
    out = np.empty((idx.size, idx.size))
    for start in range(0, idx.size, 256):
        cols = idx[start : start + 256]
        E = np.zeros((cols.size, M))
        E[np.arange(cols.size), cols] = 1.0
        out[start : start + cols.size] = work.analyze(work.synthesize(E) * vals)[:, idx]
    return 0.5 * (out + out.T)


# ----------------------------------------------------------------------
# harmonic extension
def _components(basis: HarmonicBasis, coeffs, grid: QuadratureGrid):
    """Degree-wise nodal components (K+1, N) of a coefficient vector."""
    work = basis if grid is basis.grid else basis.with_grid(grid)
    K = basis.max_degree
    C = np.zeros((K + 1, basis.num_modes))
    C[basis.degrees, np.arange(basis.num_modes)] = coeffs
    return work.synthesize(C)


@dataclass
class ExtensionProfile:
    """Harmonic extension u(r, w) = sum_k r^k f_k(w) and its norms."""

    basis: HarmonicBasis = field(repr=False)
    coefficients: np.ndarray = field(repr=False)
    solid: SolidGrid = field(repr=False)
    components: np.ndarray = field(repr=False)
    interior_norms: dict
    boundary_norms: dict
    annulus_sup: dict
    lam: Optional[float] = None

    @property
    def degrees(self) -> np.ndarray:
        """Degrees carrying energy (radial law r^k for each)."""
        e = np.bincount(self.basis.degrees, weights=self.coefficients**2)
        return np.flatnonzero(e > 1e-28)

    def values(self) -> np.ndarray:
        """Values on radial nodes (rows) plus the trace r = 1 (last row)."""
        r = np.append(self.solid.radial_nodes, 1.0)
        k = np.arange(self.components.shape[0])
        return (r[:, None] ** k[None, :]) @ self.components

    def interior_norm(self, p) -> float:
        if p not in self.interior_norms:
            self.interior_norms[p] = solid_lp_norm_of_values(self.values(), self.solid, p)
        return self.interior_norms[p]

    def boundary_norm(self, p) -> float:
        if p not in self.boundary_norms:
            self.boundary_norms[p] = lp_norm(self.components.sum(axis=0), self.solid.boundary, p)
        return self.boundary_norms[p]

    def sup_within(self, delta: float) -> float:
        """sup over r <= 1 - delta, attained on the sphere r = 1 - delta."""
        if not 0 <= delta < 1:
            raise ValueError("delta must lie in [0, 1)")
        if delta not in self.annulus_sup:
            k = np.arange(self.components.shape[0])
            u = ((1.0 - delta) ** k) @ self.components
            self.annulus_sup[delta] = float(np.abs(u).max())
        return self.annulus_sup[delta]


def default_solid(basis: HarmonicBasis, p_max: float = 4, oversample: int | None = None) -> SolidGrid:
    """Solid grid resolving |u|^p for p <= p_max (even p exactly)."""
    K = basis.max_degree
    pm = 4 if p_max == np.inf else max(2, int(np.ceil(p_max)))
    over = oversample if oversample is not None else max(2, (pm + 1) // 2 + 1)
    boundary = default_grid(basis.dim, K, oversample=over)
    num_radial = (pm * K + basis.dim) // 2 + 2
    return make_solid_grid(boundary, num_radial)


def extension_of_coeffs(
    basis: HarmonicBasis,
    coeffs,
    solid: SolidGrid | None = None,
    p_list: Sequence = (2, 4, np.inf),
    deltas: Sequence = (0.0,),
    lam: Optional[float] = None,
) -> ExtensionProfile:
    coeffs = np.asarray(coeffs, dtype=float)
    if solid is None:
        finite = [p for p in p_list if p != np.inf]
        solid = default_solid(basis, max(finite) if finite else 4)
    if solid.dim != basis.dim:
        raise ValueError("solid grid dimension mismatch")
    comps = _components(basis, coeffs, solid.boundary)
    prof = ExtensionProfile(basis, coeffs, solid, comps, {}, {}, {}, lam)
    for p in p_list:
        prof.interior_norm(p)
        prof.boundary_norm(p)
    for dlt in deltas:
        prof.sup_within(dlt)
    return prof


def extend_harmonically(
    e: Eigenpair,
    solid: SolidGrid | None = None,
    p_list: Sequence = (2, 4, np.inf),
    deltas: Sequence = (0.0,),
) -> ExtensionProfile:
    """Interior extension of an eigenfunction with norms over ``p_list``."""
    return extension_of_coeffs(e.basis, e.coefficients, solid, p_list, deltas, lam=e.lam)


def interior_boundary_ratio(profile: ExtensionProfile, p) -> float:
    """||u||_{L^p(ball)} / ||f||_{L^p(sphere)}."""
    b = profile.boundary_norm(p)
    if b == 0:
        raise ValueError("boundary norm is zero")
    return profile.interior_norm(p) / b


@dataclass(frozen=True)
class DecayProfile:
    deltas: np.ndarray
    sups: np.ndarray
    rate: float
    intercept: float
    r_squared: float


def interior_decay_profile(profile: ExtensionProfile, delta_list, lam: float | None = None) -> DecayProfile:
    """Sup norms on r <= 1 - delta and the fitted rate c in C exp(-c lam delta)."""
    lam = profile.lam if lam is None else lam
    deltas = np.asarray(sorted(delta_list), dtype=float)
    sups = np.array([profile.sup_within(d) for d in deltas])
    rate = intercept = r2 = float("nan")
    pos = sups > 0
    if lam and lam > 0 and pos.sum() >= 2:
        x = lam * deltas[pos]
        y = np.log(sups[pos])
        slope, intercept = np.polyfit(x, y, 1)
        pred = slope * x + intercept
        ss = np.sum((y - y.mean()) ** 2)
        r2 = 1.0 - np.sum((y - pred) ** 2) / ss if ss > 0 else 1.0
        rate = -slope
    return DecayProfile(deltas, sups, float(rate), float(intercept), float(r2))


# ----------------------------------------------------------------------
# dyadic pieces
def _check_ell(basis, ell):
    if 2.0 ** (ell + 1) > basis.sqrt_eigenvalue.max() + 1e-12:
        raise ValueError(
            f"dyadic index {ell} needs lambda up to 2^{ell + 1}; basis reaches "
            f"{basis.sqrt_eigenvalue.max():.3g}"
        )


def dyadic_extension_bound(
    f, ell: int, p, basis: HarmonicBasis, solid: SolidGrid | None = None
) -> float:
    """||T_H beta_ell(P) f||_{L^p(ball)} / ||f||_{L^p(sphere)} for coefficients f."""
    _check_ell(basis, ell)
    f = np.asarray(f, dtype=float)
    solid = default_solid(basis, 4 if p == np.inf else p) if solid is None else solid
    filt = f * lp_bump(ell)(basis.sqrt_eigenvalue)
    work = basis.with_grid(solid.boundary)
    fb = lp_norm(work.synthesize(f), solid.boundary, p)
    if fb == 0:
        raise ValueError("trace has zero norm")
    prof = extension_of_coeffs(basis, filt, solid, p_list=(), deltas=())
    return prof.interior_norm(p) / fb


def dyadic_extension_norm(
    ell: int,
    p: float,
    basis: HarmonicBasis,
    solid: SolidGrid | None = None,
    *,
    starts: int = 8,
    seed: int = 0,
    tol: float = 1e-5,
    max_iter: int = 150,
):
    """Lower bound for the L^p(sphere) -> L^p(ball) norm of T_H beta_ell(P).

    Boyd's power method for p -> p norms: x <- dual_p'(A^T dual_p(A x)),
    started from random traces.  At p = 2 the operator is diagonal in the
    basis and the norm max_k beta_ell(lambda_k) (2k+n+1)^(-1/2) is returned
    exactly.  Returns ``(value, converged, iterations)``.
    """
    _check_ell(basis, ell)
    if not 1 < p < np.inf:
        raise ValueError("need 1 < p < inf")
    if p == 2:
        b = lp_bump(ell)(basis.sqrt_eigenvalue)
        return float(np.max(b / np.sqrt(2.0 * basis.degrees + basis.dim + 1))), True, 0
    solid = default_solid(basis, p) if solid is None else solid
    work = basis.with_grid(solid.boundary)
    beta = lp_bump(ell)(basis.sqrt_eigenvalue)
    r = solid.radial_nodes
    rk = r[:, None] ** basis.degrees[None, :]  # (Mr, M)
    rw = solid.radial_weights
    q = p / (p - 1.0)

    def A(X):  # (B, N) traces -> (B, Mr, N) interior values
        c = work.analyze(X) * beta
        return work.synthesize(c[:, None, :] * rk[None])

    def AT(Y):  # adjoint in L^2(ball) -> L^2(sphere)
        a = work.analyze(Y)  # (B, Mr, M)
        return work.synthesize(beta * np.einsum("i,bim,im->bm", rw, a, rk))

    def norm_ball(U):
        return np.array([solid_lp_norm_of_values(np.vstack([u, u[-1:]]), solid, p) for u in U])

    def dual(Z, s):
        a = np.abs(Z)
        m = a.reshape(a.shape[0], -1).max(axis=1).reshape((-1,) + (1,) * (Z.ndim - 1))
        return (a / np.where(m > 0, m, 1.0)) ** (s - 1) * np.sign(Z)

    rng = np.random.default_rng(seed)
    X = work.synthesize(rng.standard_normal((starts, basis.num_modes)))
    X /= lp_norm(X, solid.boundary, p)[:, None]
    prev = None
    converged = False
    for it in range(1, max_iter + 1):
        U = A(X)
        vals = norm_ball(U)
        if prev is not None and np.max(np.abs(vals - prev) / np.maximum(vals, 1e-300)) < tol:
            converged = True
            break
        prev = vals
        Xn = dual(AT(dual(U, p)), q)
        nrm = lp_norm(Xn, solid.boundary, p)
        X = Xn / np.where(nrm > 0, nrm, 1.0)[:, None]
    return float(vals.max()), converged, it


# ----------------------------------------------------------------------
def h_minus_half_norm(basis: HarmonicBasis, coeffs) -> float:
    """(sum_k (1 + lambda_k^2)^(-1/2) |f_k|^2)^(1/2)."""
    c = np.asarray(coeffs, dtype=float)
    return float(np.sqrt(np.sum(c**2 / np.sqrt(1.0 + basis.laplace_eigenvalue))))


def dirichlet_apriori_check(
    f, basis: HarmonicBasis, solid: SolidGrid | None = None
) -> tuple:
    """(||u||_{L^2(ball)}, ||f||_{H^{-1/2}(sphere)}) for the harmonic extension u of f.

    The interior norm is computed by quadrature of the extension, the trace
    norm spectrally.
    """
    f = np.asarray(f, dtype=float)
    solid = default_solid(basis, 2) if solid is None else solid
    prof = extension_of_coeffs(basis, f, solid, p_list=(2,), deltas=())
    return prof.interior_norm(2), h_minus_half_norm(basis, f)
