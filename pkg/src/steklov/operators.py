"""Boundary operators in harmonic-basis coordinates.

On the unit disk/ball the Dirichlet-to-Neumann map acts on a degree-k
harmonic by multiplication with k, so D, sqrt(-Delta) and their difference
P0 are diagonal.  Multiplication by a potential couples degrees and is
assembled by quadrature.  Spectral multipliers, cluster projectors and
resolvents are diagonal in an eigenbasis.

A :class:`BoundaryOperator` stores whichever representation is cheapest:
a diagonal, a dense matrix, or an orthonormal factor ``U`` of a projector
``U U^T``.  The dense matrix is only materialised on request.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from .geometry import QuadratureGrid, lp_norm
from .harmonics import HarmonicBasis
from .potentials import PotentialField

__all__ = [
    "TAGS",
    "BoundaryOperator",
    "NormEstimate",
    "assemble_dtn",
    "assemble_sqrt_laplacian",
    "assemble_order_zero",
    "assemble_multiplication",
    "composite",
    "smooth_cutoff",
    "lp_bump",
    "apply_multiplier",
    "multiplier_operator",
    "multiplier_kernel",
    "dirichlet_kernel",
    "envelope_constant",
    "cluster_projector",
    "projector_from_vectors",
    "operator_norm_2_to_p",
    "exact_norm_2_to_inf",
    "resolvent_norm",
]

TAGS = (
    "DtN",
    "SqrtLaplacian",
    "OrderZero",
    "MultiplyV",
    "Composite",
    "Multiplier",
    "Projector",
    "Resolvent",
)


class BoundaryOperator:
    """Linear operator on coefficient vectors of ``basis``.

    Exactly one of ``diagonal``, ``dense`` or ``factor`` is given.  A
    ``factor`` U with orthonormal columns represents the projector U U^T.
    """

    def __init__(
        self,
        basis: HarmonicBasis,
        tag: str,
        *,
        diagonal=None,
        dense=None,
        factor=None,
        symmetric: bool = True,
        info: Optional[dict] = None,
    ):
        if tag not in TAGS:
            raise ValueError(f"unknown operator tag {tag!r}")
        given = [x is not None for x in (diagonal, dense, factor)]
        if sum(given) != 1:
            raise ValueError("give exactly one of diagonal, dense, factor")
        M = basis.num_modes
        self.basis = basis
        self.tag = tag
        self.symmetric = bool(symmetric)
        self.info = dict(info or {})
        self.kind = ("diagonal", "dense", "factor")[given.index(True)]
        data = next(x for x in (diagonal, dense, factor) if x is not None)
        data = np.array(data, copy=True)
        expect = {"diagonal": (M,), "dense": (M, M)}.get(self.kind)
        if expect is not None and data.shape != expect:
            raise ValueError(f"{self.kind} data must have shape {expect}, got {data.shape}")
        if self.kind == "factor" and (data.ndim != 2 or data.shape[0] != M):
            raise ValueError(f"factor must have shape ({M}, r)")
        data.setflags(write=False)
        self._data = data

    def __repr__(self):
        return f"BoundaryOperator(tag={self.tag}, kind={self.kind}, modes={self.basis.num_modes})"

    # -- representations ---------------------------------------------------
    @property
    def diagonal(self):
        return self._data if self.kind == "diagonal" else None

    @property
    def factor(self):
        return self._data if self.kind == "factor" else None

    @property
    def rank(self) -> int:
        if self.kind == "factor":
            return self._data.shape[1]
        return int(np.linalg.matrix_rank(self.matrix))

    @cached_property
    def matrix(self) -> np.ndarray:
        """Dense matrix (materialised on first access)."""
        if self.kind == "dense":
            return self._data
        if self.kind == "diagonal":
            out = np.diag(self._data)
        else:
            U = self._data
            out = U @ U.conj().T
        out.setflags(write=False)
        return out

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self._data)

    @property
    def symmetry_defect(self) -> float:
        if self.kind != "dense":
            return 0.0
        A = self._data
        return float(np.abs(A - A.T).max())

    # -- action ------------------------------------------------------------
    def apply(self, coeffs) -> np.ndarray:
        """Apply to coefficient vectors stacked along the last axis."""
        c = np.asarray(coeffs)
        if self.kind == "diagonal":
            return c * self._data
        if self.kind == "dense":
            return c @ self._data.T
        U = self._data
        return (c @ U.conj()) @ U.T

    def apply_adjoint(self, coeffs) -> np.ndarray:
        c = np.asarray(coeffs)
        if self.kind == "diagonal":
            return c * self._data.conj()
        if self.kind == "dense":
            return c @ self._data.conj()
        return self.apply(c)

    @cached_property
    def spectrum(self):
        """(eigenvalues ascending, orthonormal eigenvectors as columns)."""
        if not self.symmetric or self.is_complex:
            raise ValueError("spectral decomposition needs a real symmetric operator")
        if self.kind == "diagonal":
            order = np.argsort(self._data, kind="stable")
            U = np.eye(self.basis.num_modes)[:, order]
            return self._data[order].copy(), U
        w, U = np.linalg.eigh(self.matrix)
        return w, U

    def __add__(self, other: "BoundaryOperator") -> "BoundaryOperator":
        return composite(self, other)

    def __matmul__(self, other: "BoundaryOperator") -> "BoundaryOperator":
        if self.basis is not other.basis and self.basis.num_modes != other.basis.num_modes:
            raise ValueError("operators live on different bases")
        if self.kind == other.kind == "diagonal":
            return BoundaryOperator(self.basis, "Composite", diagonal=self._data * other._data)
        return BoundaryOperator(
            self.basis, "Composite", dense=self.matrix @ other.matrix,
            symmetric=False,
        )


# ----------------------------------------------------------------------
# assembly
def assemble_dtn(basis: HarmonicBasis) -> BoundaryOperator:
    """D on the unit disk/ball: entry k on every degree-k mode."""
    return BoundaryOperator(basis, "DtN", diagonal=basis.degrees.astype(float))


def assemble_sqrt_laplacian(basis: HarmonicBasis) -> BoundaryOperator:
    return BoundaryOperator(basis, "SqrtLaplacian", diagonal=basis.sqrt_eigenvalue)


def assemble_order_zero(basis: HarmonicBasis) -> BoundaryOperator:
    """P0 = D - sqrt(-Delta); entries k - sqrt(k(k+n-1)) tend to -(n-1)/2."""
    return BoundaryOperator(
        basis, "OrderZero", diagonal=basis.degrees - basis.sqrt_eigenvalue
    )


def assemble_multiplication(
    V: PotentialField, basis: HarmonicBasis, chunk: int = 512, tol: float = 1e-10
) -> BoundaryOperator:
    """Galerkin matrix <Y_i, V Y_j> by quadrature on ``V.grid``.

    The grid must carry the product of two degree-K modes and V.  If V has
    an evaluator and the basis grid is too coarse, V is resampled on a grid
    of sufficient exactness.  A symmetry defect above ``tol`` flags
    under-resolution (``info['under_resolved']``) and raises a warning.
    """
    if V.is_constant:
        c = float(V.values[0])
        return BoundaryOperator(
            basis, "MultiplyV", diagonal=np.full(basis.num_modes, c),
            info={"symmetry_defect": 0.0, "under_resolved": False, "constant": c},
        )
    need = 2 * basis.max_degree + (V.max_degree if V.max_degree is not None else 0)
    work = basis
    vals = V.values
    if V.grid is not basis.grid or basis.grid.exactness_degree < need:
        from .harmonics import default_grid

        if basis.grid.exactness_degree >= need and V.func is not None:
            grid = basis.grid
        else:
            K2 = (need + 1) // 2
            grid = default_grid(basis.dim, K2)
            if V.func is None:
                raise ValueError("potential grid too coarse and V has no evaluator")
        vals = V.on_grid(grid).values
        work = basis.with_grid(grid)
    M = work.num_modes
    A = np.empty((M, M))
    eye_chunk = np.zeros((min(chunk, M), M))
    for start in range(0, M, chunk):
        stop = min(start + chunk, M)
        E = eye_chunk[: stop - start]
        E[:] = 0.0
        E[np.arange(stop - start), np.arange(start, stop)] = 1.0
        A[start:stop] = work.analyze(work.synthesize(E) * vals)
    defect = float(np.abs(A - A.T).max())
    bad = defect > tol
    if bad:
        warnings.warn(
            f"multiplication matrix symmetry defect {defect:.2e} > {tol:g}; grid under-resolves V",
            RuntimeWarning,
            stacklevel=2,
        )
    A = 0.5 * (A + A.T)
    return BoundaryOperator(
        basis, "MultiplyV", dense=A,
        info={"symmetry_defect": defect, "under_resolved": bad},
    )


def composite(*ops: BoundaryOperator) -> BoundaryOperator:
    """Sum of operators on a common basis (e.g. D + V)."""
    if not ops:
        raise ValueError("need at least one operator")
    basis = ops[0].basis
    if any(op.basis.num_modes != basis.num_modes for op in ops):
        raise ValueError("operators live on different bases")
    if all(op.kind == "diagonal" for op in ops):
        d = sum(op.diagonal for op in ops)
        return BoundaryOperator(basis, "Composite", diagonal=d)
    A = sum(np.asarray(op.matrix) for op in ops)
    return BoundaryOperator(
        basis, "Composite", dense=A, symmetric=all(op.symmetric for op in ops)
    )


# ----------------------------------------------------------------------
# spectral multipliers
# Steepness of the cutoff transition.  Any value gives a C-infinity
# partition; 1.25 roughly minimises the N = 4 kernel envelope constant
# sup_u (1+u)^4 |beta-check(u)|, which keeps that constant visible already
# at small dyadic scales on the circle.
CUTOFF_STEEPNESS = 1.25


def _h(x, a=CUTOFF_STEEPNESS):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-a / x[pos])
    return out


def smooth_cutoff(s):
    """C-infinity psi with psi = 1 on [0, 1/2] and psi = 0 on [1, inf)."""
    t = 2.0 * np.asarray(s, dtype=float) - 1.0
    a, b = _h(1.0 - t), _h(t)
    return a / (a + b)


def lp_bump(ell: int) -> Callable:
    """Littlewood-Paley multiplier beta_ell.

    beta(s) = psi(s/2) - psi(s) lives in [1/2, 2]; beta_ell(s) = beta(s/2^ell)
    for ell >= 1 and beta_0(s) = psi(s/2), so sum_{ell<=L} beta_ell =
    psi(s/2^(L+1)) and the family sums to one.
    """
    ell = int(ell)
    if ell < 0:
        raise ValueError("ell must be >= 0")
    if ell == 0:
        return lambda s: smooth_cutoff(np.asarray(s, float) / 2.0)
    R = 2.0**ell

    def beta(s):
        x = np.asarray(s, float) / R
        return smooth_cutoff(x / 2.0) - smooth_cutoff(x)

    return beta


def _symbol(m, R, basis):
    if R <= 0:
        raise ValueError("R must be positive")
    vals = np.asarray(m(basis.sqrt_eigenvalue / R), dtype=float)
    return np.broadcast_to(vals, (basis.num_modes,)).copy()


def apply_multiplier(m: Callable, R: float, basis: HarmonicBasis, coeffs) -> np.ndarray:
    """m(P/R) applied mode-wise with P = sqrt(-Delta)."""
    return np.asarray(coeffs) * _symbol(m, R, basis)


def multiplier_operator(m: Callable, R: float, basis: HarmonicBasis) -> BoundaryOperator:
    return BoundaryOperator(basis, "Multiplier", diagonal=_symbol(m, R, basis))


def multiplier_kernel(
    m: Callable, R: float, basis: HarmonicBasis, rows=None, grid: QuadratureGrid | None = None
) -> np.ndarray:
    """K(x, y) = sum_modes m(lambda/R) e(x) e(y) for x in ``rows`` of ``grid``.

    Returns an array (len(rows), N).  ``rows=None`` gives the full
    symmetric matrix.
    """
    grid = basis.grid if grid is None else grid
    work = basis if grid is basis.grid else basis.with_grid(grid)
    rows = np.arange(grid.size) if rows is None else np.atleast_1d(rows)
    sym = _symbol(m, R, basis)
    if grid.dim == 1:
        E = work.mode_values(grid.nodes[rows])
    else:
        E = work.mode_values(grid.theta[rows], grid.phi[rows])
    return work.synthesize(E * sym)


def dirichlet_kernel(K: int, d) -> np.ndarray:
    """Reproducing kernel of trig polynomials of degree <= K on S^1 at gap d."""
    d = np.asarray(d, dtype=float)
    s = np.sin(d / 2.0)
    small = np.abs(s) < 1e-8
    safe = np.where(small, 1.0, s)
    out = np.sin((K + 0.5) * d) / (2.0 * np.pi * safe)
    return np.where(small, (2 * K + 1) / (2.0 * np.pi), out)


def envelope_constant(kernel, dist, R: float, n: int, N: int = 4) -> float:
    """Smallest C with |K| <= C R^n (1 + R d)^(-N) over the given pairs."""
    kernel, dist = np.asarray(kernel), np.asarray(dist)
    return float((np.abs(kernel) * (1.0 + R * dist) ** N).max() / R**n)


# ----------------------------------------------------------------------
# projectors
def projector_from_vectors(basis: HarmonicBasis, U, info=None) -> BoundaryOperator:
    U = np.asarray(U, dtype=float)
    if U.ndim == 1:
        U = U[:, None]
    return BoundaryOperator(basis, "Projector", factor=U, info=info)


def cluster_projector(op: BoundaryOperator, lam: float, width: float = 1.0) -> BoundaryOperator:
    """Orthogonal projector onto eigenvalues in [lam, lam + width).

    An empty window gives the zero projector with ``info['empty'] = True``.
    """
    if op.kind == "diagonal":
        # eigenvectors are the modes themselves; avoid an M x M identity
        d = op.diagonal
        idx = np.flatnonzero((d >= lam) & (d < lam + width))
        U = np.zeros((op.basis.num_modes, idx.size))
        U[idx, np.arange(idx.size)] = 1.0
        vals = d[idx]
    else:
        w, V = op.spectrum
        sel = (w >= lam) & (w < lam + width)
        U, vals = V[:, sel], w[sel]
    info = {"lambda": float(lam), "eigenvalues": vals.copy(), "empty": vals.size == 0}
    return projector_from_vectors(op.basis, U, info)


# ----------------------------------------------------------------------
# L^2 -> L^p norms
@dataclass
class NormEstimate:
    """Lower bound for an L^2 -> L^p norm with iteration diagnostics."""

    value: float
    p: float
    iterations: int
    converged: bool
    starts: int
    history: list = field(default_factory=list)
    exact: Optional[float] = None
    maximiser: Optional[np.ndarray] = field(default=None, repr=False)

    def __float__(self):
        return float(self.value)


def exact_norm_2_to_inf(op: BoundaryOperator, grid: QuadratureGrid | None = None, chunk=256):
    """sup_x ||(S A)_x||_2 over the nodes of ``grid``.

    The row of S A at x is the vector of values at x of the synthesised
    columns of A, so the squared row norms accumulate over column chunks.
    This is the L^2 -> L^inf norm restricted to the grid nodes (exact for
    rotation-invariant operators such as V = 0 cluster projectors).
    """
    grid = op.basis.grid if grid is None else grid
    work = op.basis if grid is op.basis.grid else op.basis.with_grid(grid)
    M = op.basis.num_modes
    acc = np.zeros(grid.size)
    if op.kind == "factor":
        cols = op.factor.T
        for start in range(0, cols.shape[0], chunk):
            acc += np.sum(np.abs(work.synthesize(cols[start : start + chunk])) ** 2, axis=0)
        return float(np.sqrt(acc.max()))
    nz = np.arange(M) if op.kind == "dense" else np.flatnonzero(op.diagonal)
    for start in range(0, nz.size, chunk):
        idx = nz[start : start + chunk]
        if op.kind == "dense":
            cols = op.matrix[:, idx].T
        else:
            cols = np.zeros((idx.size, M), dtype=op.diagonal.dtype)
            cols[np.arange(idx.size), idx] = op.diagonal[idx]
        acc += np.sum(np.abs(work.synthesize(cols)) ** 2, axis=0)
    return float(np.sqrt(acc.max()))


def _dual(g, p):
    # gradient direction of ||g||_p^p, scaled to avoid overflow
    a = np.abs(g)
    m = a.max(axis=-1, keepdims=True)
    m = np.where(m > 0, m, 1.0)
    if np.iscomplexobj(g):
        phase = np.where(a > 0, g / np.where(a > 0, a, 1.0), 0.0)
    else:
        phase = np.sign(g)
    return (a / m) ** (p - 1) * phase


def operator_norm_2_to_p(
    op: BoundaryOperator,
    p: float,
    grid: QuadratureGrid | None = None,
    *,
    starts: int = 8,
    seed: int = 0,
    tol: float = 1e-6,
    max_iter: int = 300,
    extra_starts: Sequence | None = None,
) -> NormEstimate:
    """Estimate sup_{||f||_2 = 1} ||A f||_p by the duality-map power iteration.

    Each step maps c -> A^* analyze(|g|^(p-1) sgn g) with g = synth(A c) and
    renormalises.  For convex objectives this ascent is monotone, so the
    best iterate over all starts is a certified lower bound.  All starts run
    as one batch.  ``extra_starts`` adds structured initial vectors (e.g. a
    zonal mode).  For p = inf the exact node-wise value is returned too.
    """
    if not (p == np.inf or p >= 2):
        raise ValueError(f"need 2 <= p <= inf, got {p}")
    grid = op.basis.grid if grid is None else grid
    work = op.basis if grid is op.basis.grid else op.basis.with_grid(grid)
    M = op.basis.num_modes
    rng = np.random.default_rng(seed)
    C = rng.standard_normal((starts, M))
    if op.kind == "factor":
        # random starts inside the range of the projector
        C = (C @ op.factor) @ op.factor.T
    if extra_starts is not None:
        C = np.vstack([C] + [np.atleast_2d(np.asarray(s, dtype=float)) for s in extra_starts])
    dtype = complex if op.is_complex else float
    C = C.astype(dtype)
    nrm = np.linalg.norm(C, axis=1, keepdims=True)
    C = C / np.where(nrm > 0, nrm, 1.0)

    exact = exact_norm_2_to_inf(op, grid) if p == np.inf else None
    pp = 1e6 if p == np.inf else p  # iteration uses a large finite p for the sup

    history = []
    vals_prev = None
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        G = work.synthesize(op.apply(C))
        vals = lp_norm(G, grid, p)
        vals = np.atleast_1d(vals)
        history.append(float(vals.max()))
        if vals_prev is not None:
            rel = np.abs(vals - vals_prev) / np.maximum(vals, 1e-300)
            if rel.max() < tol:
                converged = True
                break
        vals_prev = vals
        H = _dual(G, pp)
        C_new = op.apply_adjoint(work.analyze(H))
        nrm = np.linalg.norm(C_new, axis=1, keepdims=True)
        zero = nrm[:, 0] == 0
        C = np.where(zero[:, None], C, C_new / np.where(nrm > 0, nrm, 1.0))
    if not converged:
        warnings.warn(
            f"duality iteration did not converge in {max_iter} steps (p={p})",
            RuntimeWarning,
            stacklevel=2,
        )
    best = int(np.argmax(vals))
    value = float(vals[best])
    if exact is not None:
        value = max(value, exact)
    return NormEstimate(
        value=value, p=float(p), iterations=it, converged=converged,
        starts=C.shape[0], history=history, exact=exact, maximiser=C[best].copy(),
    )


def resolvent_norm(
    op: BoundaryOperator,
    lam: float,
    p: float,
    grid: QuadratureGrid | None = None,
    **kwargs,
) -> NormEstimate:
    """L^2 -> L^p norm of (A - (lam + i))^{-1} for real symmetric A.

    For diagonal A the resolvent is diagonal; otherwise it is assembled
    from the eigendecomposition.  A unit vector on the mode with eigenvalue
    closest to lam is added as a structured start.
    """
    if lam < 1:
        raise ValueError("lambda must be >= 1")
    n = op.basis.dim
    if n > 1:
        pc = 2.0 * (n + 1) / (n - 1)
        if not (2 < p <= pc):
            raise ValueError(f"need 2 < p <= {pc:g}")
    elif not p > 2:
        raise ValueError("need p > 2")
    z = lam + 1j
    if op.kind == "diagonal":
        d = 1.0 / (op.diagonal - z)
        R = BoundaryOperator(op.basis, "Resolvent", diagonal=d, symmetric=False)
        gap = np.abs(op.diagonal - lam)
        # prefer the zonal (order 0) mode among the nearest ones
        cand = np.flatnonzero(gap <= gap.min() + 1e-12)
        near = int(cand[np.argmin(np.abs(op.basis.orders[cand]))])
        start = np.zeros(op.basis.num_modes)
        start[near] = 1.0
    else:
        w, U = op.spectrum
        A = (U * (1.0 / (w - z))) @ U.T
        R = BoundaryOperator(op.basis, "Resolvent", dense=A, symmetric=False)
        start = U[:, int(np.argmin(np.abs(w - lam)))]
    extra = list(kwargs.pop("extra_starts", None) or []) + [start]
    return operator_norm_2_to_p(R, p, grid, extra_starts=extra, **kwargs)
