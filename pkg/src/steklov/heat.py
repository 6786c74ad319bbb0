"""Fractional heat kernels exp(-t((-Delta)^(alpha/2) + V)) on S^1 and S^2.

The base kernel p0 is spectral: sum_modes exp(-t lambda^alpha) e(x) e(y).
The potential enters through the Duhamel integral equation

    p^V(t) = p0(t) - int_0^t p0(t - r) V p^V(r) dr,

solved by Picard iteration.  Kernels are handled in coefficient space,
where p0(t) is the diagonal E(t) = diag(exp(-t mu)) and multiplication by V
is the Galerkin matrix; the z-integral over the sphere is then exact for
the truncated basis.  Each iterate Theta_m is stored in the rescaled form
Z_m(tau) = E(-tau/2) Theta_m(tau) E(-tau/2), which has no stiffness: the
Duhamel recursion becomes

    Z_m(tau)_ij = -exp(-tau d_ij / 2) int_0^tau exp(r d_ij / 2) H_ij(r) dr,
    H(r) = E(-r/2) V E(r/2) Z_{m-1}(r),     d_ij = mu_i - mu_j,

and every target time tau is reached by one cumulative integral over
composite Gauss-Legendre panels.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.linalg import expm
from scipy.special import roots_legendre

from .geometry import QuadratureGrid, distance_matrix
from .harmonics import HarmonicBasis
from .operators import assemble_multiplication
from .potentials import PotentialField

__all__ = [
    "q_alpha",
    "crossing_distance",
    "required_degree",
    "base_heat_kernel",
    "spectral_heat_kernel",
    "ComparisonKernel",
    "check_3p",
    "ThreePResult",
    "KatoModulus",
    "kato_weight",
    "kato_modulus",
    "time_integral_q",
    "PicardResult",
    "picard_heat_kernel",
    "picard_t0",
    "HeatKernelGrid",
    "extend_semigroup",
    "heat_kernel_grid",
    "two_sided_bound_report",
    "chapman_kolmogorov_defect",
    "circle_poisson_kernel",
]


def _check_alpha(alpha):
    if not 0 < alpha < 2:
        raise ValueError(f"alpha must lie in (0, 2), got {alpha}")


def q_alpha(alpha: float, n: int, t, d):
    """min(t^(-n/alpha), t d^(-n-alpha)); equals t^(-n/alpha) at d = 0."""
    t = np.asarray(t, dtype=float)
    d = np.asarray(d, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    if np.any(d < 0):
        raise ValueError("d must be nonnegative")
    with np.errstate(divide="ignore"):
        off = np.where(d > 0, t * np.power(np.where(d > 0, d, 1.0), -n - alpha), np.inf)
    out = np.minimum(np.power(t, -n / alpha), off)
    return float(out) if out.ndim == 0 else out


def crossing_distance(alpha: float, n: int, t: float) -> float:
    """d at which t^(-n/alpha) = t d^(-n-alpha), i.e. d = t^(1/alpha)."""
    return float(t ** (1.0 / alpha))


@dataclass(frozen=True)
class ComparisonKernel:
    alpha: float
    dim: int

    def __call__(self, t, d):
        return q_alpha(self.alpha, self.dim, t, d)


# ----------------------------------------------------------------------
# base kernel
def required_degree(alpha: float, t: float, tol: float = 1e-14, dim: int = 1) -> int:
    """Smallest K with exp(-t lambda_K^alpha) < tol."""
    lam = (np.log(1.0 / tol) / t) ** (1.0 / alpha)
    # lambda_K = sqrt(K(K+n-1)) >= K
    return int(np.ceil(lam)) + 1


def _tail_check(alpha, basis, t, tol=1e-14):
    tail = np.exp(-t * basis.sqrt_eigenvalue.max() ** alpha)
    if tail >= tol:
        raise ValueError(
            f"spectral tail exp(-t lambda_K^alpha) = {tail:.2e} >= {tol:g}: use max_degree >= "
            f"{required_degree(alpha, t, tol, basis.dim)} or a larger t"
        )


def _rows_modes(work: HarmonicBasis, rows):
    g = work.grid
    if g.dim == 1:
        return work.mode_values(g.nodes[rows])
    return work.mode_values(g.theta[rows], g.phi[rows])


def base_heat_kernel(
    alpha: float,
    basis: HarmonicBasis,
    t: float,
    rows=None,
    grid: QuadratureGrid | None = None,
    check_tail: bool = True,
) -> np.ndarray:
    """p0(t, x, y) for x in ``rows`` (default all nodes) and y over ``grid``.

    Raises
    ------
    ValueError
        If t <= 0, alpha is outside (0, 2), or the spectral tail
        exp(-t lambda_K^alpha) is not below 1e-14.
    """
    _check_alpha(alpha)
    if t <= 0:
        raise ValueError("t must be positive")
    if check_tail:
        _tail_check(alpha, basis, t)
    grid = basis.grid if grid is None else grid
    work = basis if grid is basis.grid else basis.with_grid(grid)
    rows = np.arange(grid.size) if rows is None else np.atleast_1d(rows)
    decay = np.exp(-t * basis.sqrt_eigenvalue**alpha)
    out = np.empty((rows.size, grid.size))
    for start in range(0, rows.size, 512):
        r = rows[start : start + 512]
        out[start : start + r.size] = work.synthesize(_rows_modes(work, r) * decay)
    return out


def circle_poisson_kernel(t, d):
    """Closed form of p0 for alpha = 1 on S^1 with lambda_k = k:
    (1/2pi) sinh t / (cosh t - cos d), the periodised Cauchy kernel."""
    t = np.asarray(t, dtype=float)
    return np.sinh(t) / (2.0 * np.pi * (np.cosh(t) - np.cos(d)))


def _generator(alpha, basis, V):
    mu = basis.sqrt_eigenvalue**alpha
    if V is None:
        return mu, None
    Vm = assemble_multiplication(V, basis).matrix
    return mu, np.asarray(Vm)


def spectral_heat_kernel(V, alpha: float, basis: HarmonicBasis, t: float) -> np.ndarray:
    """Nodal kernel of expm(-t (diag(lambda^alpha) + V-matrix)); the oracle."""
    mu, Vm = _generator(alpha, basis, V)
    A = np.diag(mu) if Vm is None else np.diag(mu) + Vm
    C = expm(-t * A)
    return _to_nodes(basis, C)


def _to_nodes(basis, C):
    S = basis.synthesize(np.eye(basis.num_modes))  # (M, N): row i = mode i on nodes
    return S.T @ C @ S


# ----------------------------------------------------------------------
# 3P inequality
@dataclass(frozen=True)
class ThreePResult:
    constant: float
    constant_half: float
    samples: int
    stable: bool
    argmax: tuple


def _random_points(rng, n, size):
    if n == 1:
        a = rng.uniform(0, 2 * np.pi, size)
        return np.column_stack([np.cos(a), np.sin(a)])
    v = rng.standard_normal((size, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _geo(u, v):
    if u.shape[1] == 2:
        cross = u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]
        return np.abs(np.arctan2(cross, np.sum(u * v, axis=1)))
    return np.arctan2(np.linalg.norm(np.cross(u, v), axis=1), np.sum(u * v, axis=1))


def three_p_ratio(alpha, n, t, s, dxz, dzy, dxy):
    a = q_alpha(alpha, n, t, dxz)
    b = q_alpha(alpha, n, s, dzy)
    return a * b / (q_alpha(alpha, n, s + t, dxy) * (a + b))


def check_3p(alpha: float, n: int, samples: int = 100_000, seed: int = 0, tol: float = 0.10) -> ThreePResult:
    """Largest sampled q(t,x,z) q(s,z,y) / [q(s+t,x,y)(q(t,x,z) + q(s,z,y))].

    Times s, t are uniform on (0, 1]; points are uniform on S^n.  The
    first half of the sample gives a second estimate; ``stable`` records
    agreement within ``tol``.
    """
    _check_alpha(alpha)
    rng = np.random.default_rng(seed)
    t = 1.0 - rng.uniform(0, 1, samples)
    s = 1.0 - rng.uniform(0, 1, samples)
    x, z, y = (_random_points(rng, n, samples) for _ in range(3))
    r = three_p_ratio(alpha, n, t, s, _geo(x, z), _geo(z, y), _geo(x, y))
    if not np.all(np.isfinite(r)):
        raise FloatingPointError("non-finite 3P ratio")
    i = int(np.argmax(r))
    full = float(r[i])
    half = float(r[: samples // 2].max())
    return ThreePResult(full, half, samples, abs(full - half) <= tol * full, (t[i], s[i]))


# ----------------------------------------------------------------------
# Kato modulus
def kato_weight(alpha: float, n: int) -> Callable:
    """Singular weight of the Kato condition: d^(alpha-n) for n >= 2; on S^1
    d^(alpha-1), log(2 + 1/d) or 1 for alpha <, =, > 1."""
    _check_alpha(alpha)
    if n >= 2 or alpha < 1:
        return lambda d: np.power(d, alpha - n)
    if alpha == 1:
        return lambda d: np.log(2.0 + 1.0 / np.asarray(d, float))
    return lambda d: np.ones_like(np.asarray(d, float))


def time_integral_q(alpha: float, n: int, t: float, d):
    """int_0^t q_alpha(r, d) dr in closed form.

    For r < d^alpha the branch r d^(-n-alpha) is the smaller one, beyond it
    r^(-n/alpha).  Infinite at d = 0 unless n < alpha.
    """
    d = np.asarray(d, dtype=float)
    out = np.empty_like(d)
    rs = d**alpha
    early = t <= rs
    with np.errstate(divide="ignore", invalid="ignore"):
        out[early] = 0.5 * t * t * d[early] ** (-n - alpha)
        late = ~early
        dl = d[late]
        head = np.where(dl > 0, 0.5 * dl ** (2 * alpha) * dl ** (-n - alpha), 0.0)
        k = n / alpha
        if np.isclose(k, 1.0):
            tail = np.log(t / rs[late])
        else:
            tail = (t ** (1 - k) - rs[late] ** (1 - k)) / (1 - k)
        out[late] = head + tail
    return out


@dataclass
class KatoModulus:
    """Sampled c(t) = sup_y int_0^t int q_alpha(r, y, z) |V(z)| dz dr."""

    potential: PotentialField = field(repr=False)
    alpha: float
    dim: int
    times: np.ndarray
    values: np.ndarray
    weight: Callable = field(repr=False)
    sup_points: np.ndarray = field(repr=False)

    @property
    def monotone(self) -> bool:
        return bool(np.all(np.diff(self.values) >= -1e-12 * max(self.values.max(), 1.0)))

    def vanishes_at_zero(self) -> bool:
        """c(t_min) < c(t_max) / 4 on the sampled grid."""
        return bool(self.values[0] < self.values[-1] / 4.0) if self.values[-1] > 0 else True


def _frame(y):
    a = np.array([1.0, 0.0, 0.0]) if abs(y[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = a - (a @ y) * y
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(y, e1)


def _kato_integral_at(V, alpha, n, t, y, num_angles=32):
    """int_{S^n} Q(t, d(y, z)) |V(z)| dz with adaptive quadrature in d."""
    b = crossing_distance(alpha, n, t)
    if n == 1:
        def g(u):
            return time_integral_q(alpha, 1, t, np.array([abs(u)]))[0] * abs(float(V(np.array([y + u]))[0]))
        pts = [p for p in (b,) if 0 < p < np.pi]
        left = quad(g, -np.pi, 0, points=[-p for p in pts], limit=200, epsabs=0, epsrel=1e-10)[0]
        right = quad(g, 0, np.pi, points=pts, limit=200, epsabs=0, epsrel=1e-10)[0]
        return left + right
    yv = np.array([np.sin(y[0]) * np.cos(y[1]), np.sin(y[0]) * np.sin(y[1]), np.cos(y[0])])
    e1, e2 = _frame(yv)
    om = 2.0 * np.pi * np.arange(num_angles) / num_angles

    def ring(rho):
        x = np.cos(rho) * yv[None, :] + np.sin(rho) * (
            np.cos(om)[:, None] * e1[None, :] + np.sin(om)[:, None] * e2[None, :]
        )
        th = np.arccos(np.clip(x[:, 2], -1, 1))
        ph = np.arctan2(x[:, 1], x[:, 0])
        return np.mean(np.abs(V(th, ph))) * 2.0 * np.pi

    def g(rho):
        return time_integral_q(alpha, n, t, np.array([rho]))[0] * np.sin(rho) * ring(rho)

    pts = [p for p in (b,) if 0 < p < np.pi]
    return quad(g, 0, np.pi, points=pts, limit=100, epsabs=0, epsrel=1e-6)[0]


def kato_modulus(
    V: PotentialField, alpha: float, t_grid: Sequence, max_points: int = 32
) -> KatoModulus:
    """c(t) on ``t_grid``: the r-integral in closed form, the spatial
    integral by adaptive quadrature, the sup over (a subsample of) grid nodes.

    A constant |V| is rotation invariant, so one base point suffices.
    """
    _check_alpha(alpha)
    n = V.grid.dim
    times = np.asarray(sorted(t_grid), dtype=float)
    if V.func is None:
        raise ValueError("Kato modulus needs a potential with an evaluator")
    if np.all(V.values == 0):
        return KatoModulus(V, alpha, n, times, np.zeros(times.size), kato_weight(alpha, n), np.empty(0))
    g = V.grid
    if V.is_constant:
        idx = np.array([0])
    else:
        idx = np.unique(np.linspace(0, g.size - 1, min(max_points, g.size)).astype(int))
    vals = np.empty(times.size)
    for i, t in enumerate(times):
        best = 0.0
        for j in idx:
            y = g.nodes[j]
            best = max(best, _kato_integral_at(V, alpha, n, t, y))
        vals[i] = best
    return KatoModulus(V, alpha, n, times, vals, kato_weight(alpha, n), g.nodes[idx])


# ----------------------------------------------------------------------
# Picard iteration
def _panel_rule(t, panels, order=32):
    """Composite Gauss-Legendre nodes on (0, t) and, per panel, the matrix
    mapping nodal values to cumulative integrals from the panel start."""
    x, w = roots_legendre(order)
    h = t / panels
    # Lagrange basis antiderivatives on [-1, 1]: integrate the interpolant
    V = np.polynomial.legendre.legvander(x, order - 1)  # values of P_j at nodes
    coef = np.linalg.solve(V, np.eye(order))  # Legendre coefficients of each Lagrange basis fn
    S = np.empty((order, order))
    for b in range(order):
        anti = np.polynomial.legendre.legint(coef[:, b], lbnd=-1.0)
        S[:, b] = np.polynomial.legendre.legval(x, anti)
    nodes = np.concatenate([(p + 0.5 * (x + 1.0)) * h for p in range(panels)])
    return nodes, 0.5 * h * w, 0.5 * h * S


def _cumulative(G, panels, w, S):
    """Cumulative integrals of G (A, M, M) at every node, plus the total."""
    order = w.size
    out = np.empty_like(G)
    acc = np.zeros(G.shape[1:], dtype=G.dtype)
    for p in range(panels):
        sl = slice(p * order, (p + 1) * order)
        Gp = G[sl]
        out[sl] = acc[None] + np.tensordot(S, Gp, axes=(1, 0))
        acc = acc + np.tensordot(w, Gp, axes=(0, 0))
    return out, acc


@dataclass
class PicardResult:
    kernel: np.ndarray = field(repr=False)
    coefficient_kernel: np.ndarray = field(repr=False)
    ratios: list
    theta_norms: list
    converged: bool
    iterations: int
    panels: int
    panel_change: float
    t: float
    alpha: float

    @property
    def contraction(self) -> float:
        """Largest measured ||Theta_m|| / ||Theta_{m-1}||."""
        return max(self.ratios) if self.ratios else 0.0


def _picard_once(mu, Vm, t, panels, max_iters, tol, to_nodes):
    nodes, w, S = _panel_rule(t, panels)
    delta = mu[:, None] - mu[None, :]
    half = np.exp(-0.5 * t * mu)
    p0 = to_nodes(np.diag(np.exp(-t * mu)))
    p0max = np.abs(p0).max()
    Z = np.broadcast_to(np.eye(mu.size), (nodes.size,) + (mu.size,) * 2)
    total = np.diag(np.exp(-t * mu))
    prev = p0max
    ratios, norms = [], [p0max]
    converged = False
    m = 0
    eplus = np.exp(0.5 * nodes[:, None] * mu[None, :])
    eminus = 1.0 / eplus
    for m in range(1, max_iters + 1):
        # H(r) = E(-r/2) V E(r/2) Z(r), then G = exp(r delta / 2) * H
        H = np.einsum("ai,ij,aj,ajk->aik", eplus, Vm, eminus, Z, optimize=True)
        G = np.exp(0.5 * nodes[:, None, None] * delta[None]) * H
        cum, tot = _cumulative(G, panels, w, S)
        Z = -np.exp(-0.5 * nodes[:, None, None] * delta[None]) * cum
        Zt = -np.exp(-0.5 * t * delta) * tot
        theta = half[:, None] * Zt * half[None, :]
        total = total + theta
        tn = np.abs(to_nodes(theta)).max()
        ratios.append(tn / prev if prev > 0 else 0.0)
        norms.append(tn)
        prev = tn
        if tn / p0max < tol:
            converged = True
            break
    return total, ratios, norms, converged, m


def picard_heat_kernel(
    V: PotentialField,
    alpha: float,
    basis: HarmonicBasis,
    t: float,
    max_iters: int = 60,
    tol: float = 1e-10,
    panel_tol: float = 1e-8,
    max_panels: int = 16,
    check_tail: bool = True,
) -> PicardResult:
    """Heat kernel of (-Delta)^(alpha/2) + V at time t by Picard iteration.

    The r-integral uses composite 32-point Gauss-Legendre panels, doubled
    until the nodal kernel changes by less than ``panel_tol``.

    Raises
    ------
    ValueError
        If alpha is outside (0, 2), t <= 0, or the spectral tail is too big.
    RuntimeError
        If the iterates stop contracting (measured ratio >= 1), i.e. t is
        too large for the Picard series; extend with :func:`extend_semigroup`.
    """
    _check_alpha(alpha)
    if t <= 0:
        raise ValueError("t must be positive")
    if check_tail:
        _tail_check(alpha, basis, t)
    mu, Vm = _generator(alpha, basis, V)
    S = basis.synthesize(np.eye(basis.num_modes))

    def to_nodes(C):
        return S.T @ C @ S

    if Vm is None:
        Vm = np.zeros((mu.size, mu.size))
    panels = 1
    total, ratios, norms, conv, m = _picard_once(mu, Vm, t, panels, max_iters, tol, to_nodes)
    change = np.inf
    while panels < max_panels:
        t2 = _picard_once(mu, Vm, t, 2 * panels, max_iters, tol, to_nodes)
        change = float(np.abs(to_nodes(t2[0] - total)).max())
        panels *= 2
        total, ratios, norms, conv, m = t2
        if change < panel_tol:
            break
    if ratios and max(ratios[1:] or ratios) >= 1.0:
        raise RuntimeError(
            f"Picard iterates do not contract at t={t} (ratio {max(ratios):.3g}); "
            "use a smaller t and extend_semigroup"
        )
    kernel = to_nodes(total)
    return PicardResult(kernel, total, ratios, norms, conv, m, panels, change, float(t), alpha)


def picard_t0(V, alpha, basis, times, threshold: float = 1.0 / 3.0, **kw):
    """Largest t in ``times`` whose measured contraction ratio is <= threshold,
    with the ratio for every t.  Returns ``(t0, {t: ratio})``.

    The ratios are sup-norm quotients of whole iterates, so the pointwise
    spectral-tail requirement is waived here.
    """
    kw.setdefault("check_tail", False)
    ratios = {}
    t0 = None
    for t in sorted(times):
        try:
            r = picard_heat_kernel(V, alpha, basis, t, **kw).contraction
        except RuntimeError:
            r = np.inf
        ratios[t] = r
        if r <= threshold:
            t0 = t
        else:
            break
    return t0, ratios


# ----------------------------------------------------------------------
@dataclass
class HeatKernelGrid:
    """Kernels p(t, x, y) over a dyadic time grid.

    ``kernels[t]`` has shape (len(rows), N); ``rows`` are the source nodes.
    """

    alpha: float
    grid: QuadratureGrid = field(repr=False)
    times: list
    kernels: dict = field(repr=False)
    provenance: str
    rows: np.ndarray = field(repr=False)
    diagnostics: dict = field(default_factory=dict)

    def symmetry_defect(self, t) -> float:
        P = self.kernels[t]
        if P.shape[0] != P.shape[1]:
            raise ValueError("symmetry needs the full kernel matrix")
        return float(np.abs(P - P.T).max())


def chapman_kolmogorov_defect(P_t, P_2t, weights) -> float:
    """max |P(2t) - P(t) W P(t)| / max |P(2t)| for full kernel matrices."""
    comp = (P_t * weights[None, :]) @ P_t
    return float(np.abs(comp - P_2t).max() / np.abs(P_2t).max())


def extend_semigroup(kernel, grid: QuadratureGrid, t: float, doublings: int, alpha: float = 1.0,
                     provenance: str = "semigroup-extended") -> HeatKernelGrid:
    """p(2s) = int p(s, x, z) p(s, z, y) dz applied ``doublings`` times."""
    if doublings < 0:
        raise ValueError("doublings must be >= 0")
    P = np.asarray(kernel, dtype=float)
    if P.shape != (grid.size, grid.size):
        raise ValueError("semigroup extension needs the full N x N kernel")
    times = [float(t)]
    kernels = {float(t): P}
    for j in range(doublings):
        P = (P * grid.weights[None, :]) @ P
        P = 0.5 * (P + P.T)
        tt = float(t) * 2 ** (j + 1)
        times.append(tt)
        kernels[tt] = P
    return HeatKernelGrid(alpha, grid, times, kernels, provenance, np.arange(grid.size))


def heat_kernel_grid(
    V: Optional[PotentialField],
    alpha: float,
    basis: HarmonicBasis,
    times: Sequence,
    rows=None,
    grid: QuadratureGrid | None = None,
) -> HeatKernelGrid:
    """Kernels at each t: spectral p0 for V = 0, exp(-ct) p0 for V = c,
    Picard otherwise (full matrices on the basis grid)."""
    grid = basis.grid if grid is None else grid
    rows = np.arange(grid.size) if rows is None else np.atleast_1d(rows)
    kernels = {}
    if V is None or np.all(V.values == 0):
        prov = "base"
        for t in times:
            kernels[float(t)] = base_heat_kernel(alpha, basis, t, rows, grid)
    elif V.is_constant:
        prov = "closed-form"
        c = float(V.values[0])
        for t in times:
            kernels[float(t)] = np.exp(-c * t) * base_heat_kernel(alpha, basis, t, rows, grid)
    else:
        prov = "picard"
        if grid is not basis.grid:
            raise ValueError("Picard kernels live on the basis grid")
        for t in times:
            kernels[float(t)] = picard_heat_kernel(V, alpha, basis, t).kernel[rows]
    return HeatKernelGrid(alpha, grid, [float(t) for t in times], kernels, prov, rows)


def two_sided_bound_report(kg: HeatKernelGrid, alpha: float | None = None, exclude_spacings: float | None = None):
    """Per-t (sup, inf) of p / q_alpha over the stored node pairs.

    On S^2 pairs closer than two grid spacings are excluded by default
    (the truncated basis cannot resolve the diagonal peak there).
    Returns ``(sup dict, inf dict)`` and stores both in ``kg.diagnostics``.
    """
    alpha = kg.alpha if alpha is None else alpha
    n = kg.grid.dim
    if exclude_spacings is None:
        exclude_spacings = 2.0 if n == 2 else 0.0
    D = distance_matrix(kg.grid, kg.rows)
    mask = D >= exclude_spacings * kg.grid.spacing if exclude_spacings > 0 else np.ones_like(D, bool)
    sups, infs = {}, {}
    for t in kg.times:
        r = kg.kernels[t][mask] / q_alpha(alpha, n, t, D[mask])
        sups[t] = float(r.max())
        infs[t] = float(r.min())
    kg.diagnostics.update({"sup_ratio": sups, "inf_ratio": infs, "excluded_below": exclude_spacings})
    return sups, infs
