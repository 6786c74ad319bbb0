"""Real orthonormal spherical-harmonic bases on S^1 and S^2.

Mode ordering
-------------
n = 1: index 0 is the constant 1/sqrt(2 pi); for k >= 1, index 2k-1 is
cos(k theta)/sqrt(pi) (order +k) and index 2k is sin(k theta)/sqrt(pi)
(order -k).

n = 2: mode (k, m), -k <= m <= k, sits at index k^2 + k + m.  With
Pbar_k^m the associated Legendre function normalised to unit L^2 norm on
[-1, 1],

    Y_k^0  = Pbar_k^0(cos t) / sqrt(2 pi)
    Y_k^m  = Pbar_k^m(cos t) cos(m p) / sqrt(pi)      m > 0
    Y_k^-m = Pbar_k^m(cos t) sin(m p) / sqrt(pi)      m > 0

No Condon-Shortley phase.  Transforms use a real FFT in longitude and a
dense Legendre table in colatitude, so no (nodes x modes) matrix is formed
unless :attr:`HarmonicBasis.matrix` is requested.
"""
from __future__ import annotations

from functools import cached_property

import numpy as np
from scipy.special import eval_legendre

from .geometry import QuadratureGrid, lp_norm, make_circle_grid, make_sphere_grid

__all__ = [
    "HarmonicBasis",
    "build_basis",
    "legendre_table",
    "num_modes",
    "zonal_harmonic",
    "highest_weight_harmonic",
    "refined_sup_norm",
    "default_grid",
]

SQRT_PI = np.sqrt(np.pi)
SQRT_2PI = np.sqrt(2.0 * np.pi)


def num_modes(dim: int, max_degree: int) -> int:
    return 2 * max_degree + 1 if dim == 1 else (max_degree + 1) ** 2


def default_grid(dim: int, max_degree: int, oversample: int = 1) -> QuadratureGrid:
    """Smallest standard grid whose exactness degree is >= 2 * oversample * K."""
    K = max_degree * oversample
    if dim == 1:
        return make_circle_grid(max(4, 2 * K + 2))
    return make_sphere_grid(max(2, K + 1), max(4, 2 * K + 2))


def legendre_table(max_degree: int, x, derivative: bool = False):
    """Normalised associated Legendre functions Pbar_k^m(x).

    Returns ``P`` with shape (K+1, K+1, len(x)) indexed ``[m, k, i]``
    (zero for k < m).  With ``derivative=True`` also returns d/dtheta of
    each entry, where x = cos(theta); the derivative is singular at the
    poles and must not be requested there.
    """
    K = int(max_degree)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    P = np.zeros((K + 1, K + 1, x.size))
    pmm = np.full(x.size, np.sqrt(0.5))
    for m in range(K + 1):
        if m > 0:
            pmm = np.sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * pmm
        P[m, m] = pmm
        if m + 1 <= K:
            P[m, m + 1] = np.sqrt(2.0 * m + 3.0) * x * pmm
        a_prev = np.sqrt(2.0 * m + 3.0)
        for k in range(m + 2, K + 1):
            a = np.sqrt((4.0 * k * k - 1.0) / (k * k - m * m))
            P[m, k] = a * (x * P[m, k - 1] - P[m, k - 2] / a_prev)
            a_prev = a
    if not derivative:
        return P
    dP = np.zeros_like(P)
    ks = np.arange(K + 1, dtype=float)
    for m in range(K + 1):
        k = ks[m:]
        dP[m, m:] = k[:, None] * x[None, :] * P[m, m:]
        if m + 1 <= K:
            kk = ks[m + 1 :]
            c = np.sqrt((2 * kk + 1) * (kk * kk - m * m) / (2 * kk - 1))
            dP[m, m + 1 :] -= c[:, None] * P[m, m:K]
    dP /= s[None, None, :]
    return P, dP


class HarmonicBasis:
    """Degree-indexed real harmonic basis tied to a quadrature grid.

    Parameters
    ----------
    dim : 1 or 2
    max_degree : truncation degree K
    grid : quadrature grid; its exactness degree must be >= 2K so that
        the discrete inner product reproduces orthonormality.
    """

    def __init__(self, dim: int, max_degree: int, grid: QuadratureGrid):
        if dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {dim}")
        if grid.dim != dim:
            raise ValueError("grid dimension does not match basis dimension")
        if max_degree < 0:
            raise ValueError("max_degree must be >= 0")
        if grid.exactness_degree < 2 * max_degree:
            raise ValueError(
                f"grid exactness {grid.exactness_degree} < 2*max_degree = {2 * max_degree}; "
                "refine the grid"
            )
        if dim == 1 and grid.size <= 2 * max_degree:
            raise ValueError("circle grid must have more than 2K nodes")
        self.dim = dim
        self.max_degree = int(max_degree)
        self.grid = grid
        K = self.max_degree
        if dim == 1:
            deg = np.zeros(2 * K + 1, dtype=int)
            order = np.zeros(2 * K + 1, dtype=int)
            deg[1::2] = deg[2::2] = np.arange(1, K + 1)
            order[1::2] = np.arange(1, K + 1)
            order[2::2] = -np.arange(1, K + 1)
        else:
            deg = np.concatenate([np.full(2 * k + 1, k) for k in range(K + 1)])
            order = np.concatenate([np.arange(-k, k + 1) for k in range(K + 1)])
        self.degrees = deg
        self.orders = order
        self.laplace_eigenvalue = (deg * (deg + dim - 1)).astype(float)
        self.sqrt_eigenvalue = np.sqrt(self.laplace_eigenvalue)
        for a in (self.degrees, self.orders, self.laplace_eigenvalue, self.sqrt_eigenvalue):
            a.setflags(write=False)

    def __repr__(self):
        return f"HarmonicBasis(dim={self.dim}, max_degree={self.max_degree}, nodes={self.grid.size})"

    @property
    def num_modes(self) -> int:
        return self.degrees.size

    def index(self, k: int, m: int) -> int:
        if not 0 <= k <= self.max_degree:
            raise ValueError(f"degree {k} outside 0..{self.max_degree}")
        if self.dim == 1:
            if k == 0:
                return 0
            if m == k:
                return 2 * k - 1
            if m == -k:
                return 2 * k
            raise ValueError("on S^1 the order must be +k (cos) or -k (sin)")
        if abs(m) > k:
            raise ValueError("|m| > k")
        return k * k + k + m

    def degree_mask(self, lo: int, hi: int) -> np.ndarray:
        """Boolean mask of modes with lo <= degree <= hi."""
        return (self.degrees >= lo) & (self.degrees <= hi)

    def with_grid(self, grid: QuadratureGrid) -> "HarmonicBasis":
        """Same modes on another grid (e.g. a finer one for L^p norms)."""
        return HarmonicBasis(self.dim, self.max_degree, grid)

    # ------------------------------------------------------------------
    # sphere bookkeeping
    @cached_property
    def _sphere_index(self):
        K = self.max_degree
        cos_idx = np.full((K + 1, K + 1), -1)
        sin_idx = np.full((K + 1, K + 1), -1)
        for m in range(K + 1):
            k = np.arange(m, K + 1)
            cos_idx[m, m:] = k * k + k + m
            if m > 0:
                sin_idx[m, m:] = k * k + k - m
        return cos_idx, sin_idx

    @cached_property
    def _plm(self):
        x = np.cos(self.grid.lat_nodes)
        return legendre_table(self.max_degree, x)

    @cached_property
    def _lat_weights(self):
        # Gauss-Legendre weights in cos(theta)
        return self.grid.weights.reshape(self.grid.shape).sum(axis=1) / (2.0 * np.pi)

    def _split(self, coeffs):
        """(B, M) coefficients -> cosine/sine arrays indexed [m, B, k]."""
        cos_idx, sin_idx = self._sphere_index
        pad = np.concatenate([coeffs, np.zeros(coeffs.shape[:-1] + (1,), coeffs.dtype)], axis=-1)
        C = np.moveaxis(pad[:, cos_idx], 0, 1)
        S = np.moveaxis(pad[:, sin_idx], 0, 1)
        return C, S

    def _merge(self, C, S):
        cos_idx, sin_idx = self._sphere_index
        B = C.shape[1]
        out = np.zeros((B, self.num_modes + 1), dtype=np.result_type(C, S))
        out[:, cos_idx] = np.moveaxis(C, 0, 1)
        out[:, sin_idx[1:]] = np.moveaxis(S[1:], 0, 1)
        return out[:, : self.num_modes]

    @staticmethod
    def _lon_synthesis(gc, gs, phi):
        """sum_m gc[m] cos(m phi) + gs[m] sin(m phi) with the Y normalisation.

        ``gc``/``gs`` have shape (K+1, B, L); returns (B, L, len(phi)).
        """
        K1 = gc.shape[0]
        m = np.arange(K1)
        norm = np.where(m == 0, 1.0 / SQRT_2PI, 1.0 / SQRT_PI)
        cos_mp = np.cos(np.outer(m, phi)) * norm[:, None]
        sin_mp = np.sin(np.outer(m, phi)) * norm[:, None]
        return np.einsum("mbl,mp->blp", gc, cos_mp) + np.einsum("mbl,mp->blp", gs, sin_mp)

    # ------------------------------------------------------------------
    def synthesize(self, coeffs) -> np.ndarray:
        """Coefficients (..., M) -> nodal values (..., N) on ``self.grid``."""
        c = np.asarray(coeffs)
        if c.shape[-1] != self.num_modes:
            raise ValueError(f"expected {self.num_modes} coefficients, got {c.shape[-1]}")
        if np.iscomplexobj(c):
            return self.synthesize(c.real) + 1j * self.synthesize(c.imag)
        lead = c.shape[:-1]
        c2 = c.reshape(-1, self.num_modes).astype(float)
        if self.dim == 1:
            out = self._synth_circle(c2)
        else:
            out = self._synth_sphere(c2)
        return out.reshape(lead + (self.grid.size,))

    def _synth_circle(self, c):
        N, K = self.grid.size, self.max_degree
        spec = np.zeros((c.shape[0], N // 2 + 1), dtype=complex)
        spec[:, 0] = N * c[:, 0] / SQRT_2PI
        spec[:, 1 : K + 1] = N * (c[:, 1::2] - 1j * c[:, 2::2]) / (2.0 * SQRT_PI)
        return np.fft.irfft(spec, n=N, axis=-1)

    def _synth_sphere(self, c):
        nlat, nlon = self.grid.shape
        K = self.max_degree
        C, S = self._split(c)
        P = self._plm
        gc = np.matmul(C, P)  # (m, B, nlat)
        gs = np.matmul(S, P)
        m = np.arange(K + 1)
        norm = np.where(m == 0, 1.0 / SQRT_2PI, 1.0 / SQRT_PI)
        spec = np.zeros((c.shape[0], nlat, nlon // 2 + 1), dtype=complex)
        spec[:, :, : K + 1] = np.moveaxis(
            (gc - 1j * gs) * (nlon * norm / np.where(m == 0, 1.0, 2.0))[:, None, None], 0, -1
        )
        vals = np.fft.irfft(spec, n=nlon, axis=-1)
        return vals.reshape(c.shape[0], nlat * nlon)

    def analyze(self, values) -> np.ndarray:
        """Nodal values (..., N) -> coefficients (..., M) by quadrature.

        Exact for inputs of degree <= K.  Higher-degree content aliases;
        see :meth:`energy_leak`.
        """
        v = np.asarray(values)
        if v.shape[-1] != self.grid.size:
            raise ValueError(f"expected {self.grid.size} nodal values, got {v.shape[-1]}")
        if np.iscomplexobj(v):
            return self.analyze(v.real) + 1j * self.analyze(v.imag)
        lead = v.shape[:-1]
        v2 = v.reshape(-1, self.grid.size).astype(float)
        out = self._anal_circle(v2) if self.dim == 1 else self._anal_sphere(v2)
        return out.reshape(lead + (self.num_modes,))

    def _anal_circle(self, v):
        N, K = self.grid.size, self.max_degree
        F = np.fft.rfft(v, axis=-1)
        h = 2.0 * np.pi / N
        out = np.empty((v.shape[0], 2 * K + 1))
        out[:, 0] = h * F[:, 0].real / SQRT_2PI
        out[:, 1::2] = h * F[:, 1 : K + 1].real / SQRT_PI
        out[:, 2::2] = -h * F[:, 1 : K + 1].imag / SQRT_PI
        return out

    def _anal_sphere(self, v):
        nlat, nlon = self.grid.shape
        K = self.max_degree
        F = np.fft.rfft(v.reshape(-1, nlat, nlon), axis=-1)[:, :, : K + 1]
        h = 2.0 * np.pi / nlon
        m = np.arange(K + 1)
        norm = np.where(m == 0, 1.0 / SQRT_2PI, 1.0 / SQRT_PI)
        wl = self._lat_weights
        a = np.moveaxis(F.real, -1, 0) * (h * norm)[:, None, None] * wl  # (m, B, nlat)
        b = -np.moveaxis(F.imag, -1, 0) * (h * norm)[:, None, None] * wl
        PT = np.swapaxes(self._plm, 1, 2)  # (m, nlat, k)
        C = np.matmul(a, PT)
        S = np.matmul(b, PT)
        return self._merge(C, S)

    def energy_leak(self, values) -> float:
        """Fraction of the grid L^2 energy not captured by degrees <= K."""
        v = np.asarray(values)
        total = lp_norm(v, self.grid, 2) ** 2
        if total == 0:
            return 0.0
        kept = float(np.sum(np.abs(self.analyze(v)) ** 2))
        return max(0.0, 1.0 - kept / total)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Dense (N, M) synthesis matrix.  Only sensible for small bases."""
        return self.synthesize(np.eye(self.num_modes)).T.copy()

    # ------------------------------------------------------------------
    # evaluation off the quadrature grid
    def evaluate(self, coeffs, theta, phi=None) -> np.ndarray:
        """Evaluate at arbitrary angles (n=1) or on the tensor grid theta x phi (n=2).

        For n=2 the result has shape (..., len(theta), len(phi)).
        """
        c = np.asarray(coeffs, dtype=float)
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if self.dim == 1:
            return self._eval_circle(c, theta, 0)
        return self._eval_sphere(c, theta, np.atleast_1d(phi), 0, 0)

    def evaluate_derivatives(self, coeffs, theta, phi=None, order: int = 1):
        """Angular derivatives on arbitrary points.

        n=1: returns d^order e / d theta^order at ``theta``.
        n=2: returns (e_theta, e_phi) for order 1, or
        (e_thth, e_thph, e_phph) for order 2, on the tensor grid.
        """
        c = np.asarray(coeffs, dtype=float)
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if self.dim == 1:
            return self._eval_circle(c, theta, order)
        phi = np.atleast_1d(phi)
        if order == 1:
            return (
                self._eval_sphere(c, theta, phi, 1, 0),
                self._eval_sphere(c, theta, phi, 0, 1),
            )
        if order == 2:
            return (
                self._eval_sphere(c, theta, phi, 2, 0),
                self._eval_sphere(c, theta, phi, 1, 1),
                self._eval_sphere(c, theta, phi, 0, 2),
            )
        raise ValueError("order must be 1 or 2")

    def _eval_circle(self, c, theta, order):
        K = self.max_degree
        k = np.arange(1, K + 1)
        ang = np.outer(theta, k)
        # d^j/dtheta^j of cos/sin cycles through (cos, -sin, -cos, sin)
        phase = order * np.pi / 2.0
        ck = np.cos(ang + phase) * k**order / SQRT_PI
        sk = np.sin(ang + phase) * k**order / SQRT_PI
        out = ck @ c[..., 1::2].T + sk @ c[..., 2::2].T
        if order == 0:
            out = out + c[..., 0] / SQRT_2PI
        return out.T if c.ndim > 1 else out

    def _eval_sphere(self, c, theta, phi, dth, dph):
        K = self.max_degree
        x = np.cos(theta)
        if dth == 0:
            P = legendre_table(K, x)
        else:
            P0, P1 = legendre_table(K, x, derivative=True)
            if dth == 1:
                P = P1
            else:
                # Legendre ODE in theta: P'' = -cot P' - (k(k+1) - m^2/sin^2) P
                s2 = np.sin(theta) ** 2
                k = np.arange(K + 1)[None, :, None]
                m = np.arange(K + 1)[:, None, None]
                P = -(x / np.sqrt(s2))[None, None, :] * P1 - (k * (k + 1) - m * m / s2[None, None, :]) * P0
        single = c.ndim == 1
        c2 = c.reshape(-1, self.num_modes)
        C, S = self._split(c2)
        gc = np.matmul(C, P)
        gs = np.matmul(S, P)
        m = np.arange(K + 1)[:, None, None]
        # d/dphi: cos -> -m sin, sin -> m cos
        for _ in range(dph):
            gc, gs = gs * m, -gc * m
        out = self._lon_synthesis(gc, gs, np.asarray(phi, dtype=float))
        return out[0] if single else out

    def mode_values(self, theta, phi=None) -> np.ndarray:
        """Every basis function at scattered points: array (P, M)."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        K = self.max_degree
        if self.dim == 1:
            out = np.empty((theta.size, self.num_modes))
            k = np.arange(1, K + 1)
            out[:, 0] = 1.0 / SQRT_2PI
            out[:, 1::2] = np.cos(np.outer(theta, k)) / SQRT_PI
            out[:, 2::2] = np.sin(np.outer(theta, k)) / SQRT_PI
            return out
        phi = np.atleast_1d(np.asarray(phi, dtype=float))
        P = legendre_table(K, np.cos(theta))
        out = np.empty((theta.size, self.num_modes))
        cos_idx, sin_idx = self._sphere_index
        for m in range(K + 1):
            ks = slice(m, K + 1)
            if m == 0:
                out[:, cos_idx[0, ks]] = P[0, ks].T / SQRT_2PI
                continue
            out[:, cos_idx[m, ks]] = P[m, ks].T * (np.cos(m * phi) / SQRT_PI)[:, None]
            out[:, sin_idx[m, ks]] = P[m, ks].T * (np.sin(m * phi) / SQRT_PI)[:, None]
        return out

    def derivative_coeffs(self, coeffs, order: int = 1) -> np.ndarray:
        """Coefficients of d^order/dtheta^order (circle only)."""
        if self.dim != 1:
            raise ValueError("derivative_coeffs is only defined on S^1")
        c = np.array(coeffs, dtype=float)
        k = np.arange(1, self.max_degree + 1)
        for _ in range(order):
            a, b = c[..., 1::2].copy(), c[..., 2::2].copy()
            c[..., 1::2] = k * b
            c[..., 2::2] = -k * a
            c[..., 0] = 0.0
        return c


def build_basis(dim: int, max_degree: int, grid: QuadratureGrid | None = None) -> HarmonicBasis:
    """Build a basis, creating the smallest adequate grid if none is given."""
    if grid is None:
        grid = default_grid(dim, max_degree)
    return HarmonicBasis(dim, max_degree, grid)


def _pole_vector(dim, pole):
    if dim == 1:
        return float(pole)
    pole = np.asarray(pole, dtype=float)
    if pole.shape == (2,):
        th, ph = pole
        return np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])
    if pole.shape == (3,):
        return pole / np.linalg.norm(pole)
    raise ValueError("pole must be (colatitude, longitude) or a 3-vector")


def zonal_harmonic(basis: HarmonicBasis, k: int, pole=None) -> np.ndarray:
    """L^2-normalised zonal harmonic of degree k about ``pole``, on the basis grid."""
    if not 0 <= k <= basis.max_degree:
        raise ValueError(f"degree {k} exceeds max_degree {basis.max_degree}")
    g = basis.grid
    if basis.dim == 1:
        th0 = 0.0 if pole is None else _pole_vector(1, pole)
        if k == 0:
            return np.full(g.size, 1.0 / SQRT_2PI)
        return np.cos(k * (g.nodes - th0)) / SQRT_PI
    u = np.array([0.0, 0.0, 1.0]) if pole is None else _pole_vector(2, pole)
    t = np.clip(g.points @ u, -1.0, 1.0)
    return np.sqrt((2 * k + 1) / (4.0 * np.pi)) * eval_legendre(k, t)


def highest_weight_harmonic(basis: HarmonicBasis, k: int) -> np.ndarray:
    """Normalised real part of (sin t)^k e^{ik p} on S^2, i.e. the mode Y_k^k."""
    if basis.dim == 1:
        raise ValueError("highest-weight harmonics are degenerate on S^1")
    if not 0 <= k <= basis.max_degree:
        raise ValueError(f"degree {k} exceeds max_degree {basis.max_degree}")
    c = np.zeros(basis.num_modes)
    c[basis.index(k, k)] = 1.0
    return basis.synthesize(c)


def refined_sup_norm(basis: HarmonicBasis, coeffs, tol: float = 0.01):
    """Sup norm by grid maxima, refined by doubling resolution.

    Returns ``(value, converged)``: the maximum on the finest grid tried and
    whether the last doubling changed it by less than ``tol`` (relative).
    """
    c = np.asarray(coeffs)
    prev = None
    for factor in (2, 4, 8):
        K = basis.max_degree
        if basis.dim == 1:
            th = 2 * np.pi * np.arange(factor * (2 * K + 2)) / (factor * (2 * K + 2))
            val = float(np.abs(basis.evaluate(c, th)).max())
        else:
            nlat = factor * (K + 1)
            # midpoints plus both poles, where zonal peaks sit
            th = np.concatenate([[0.0], (np.arange(nlat) + 0.5) * np.pi / nlat, [np.pi]])
            ph = 2 * np.pi * np.arange(2 * nlat) / (2 * nlat)
            val = float(np.abs(basis.evaluate(c, th, ph)).max())
        if prev is not None and abs(val - prev) <= tol * max(abs(val), 1e-300):
            return val, True
        prev = val
    return prev, False
