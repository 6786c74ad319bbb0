"""Quadrature grids on S^1 / S^2 and on the solid disk / ball.

Every integral in the package goes through one of two rules:

* the uniform rule on the circle, exact for trigonometric polynomials of
  degree < num_nodes;
* Gauss-Legendre in cos(colatitude) times a uniform longitude rule on the
  sphere, exact for spherical harmonics of degree
  <= min(2*num_lat - 1, num_lon - 1).

Solid grids add a Gauss-Jacobi radial rule with the Jacobian r^n built in.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

__all__ = [
    "QuadratureGrid",
    "SolidGrid",
    "make_circle_grid",
    "make_sphere_grid",
    "make_solid_grid",
    "geodesic_distance",
    "distances_from",
    "distance_matrix",
    "lp_norm",
    "solid_values",
    "solid_lp_norm",
    "sphere_measure",
]


def sphere_measure(dim: int) -> float:
    """Surface measure of the unit sphere S^dim (dim = 1 or 2)."""
    if dim == 1:
        return 2.0 * np.pi
    if dim == 2:
        return 4.0 * np.pi
    raise ValueError(f"dim must be 1 or 2, got {dim}")


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class QuadratureGrid:
    """Nodes and positive weights on S^1 or S^2.

    For ``dim == 1`` ``nodes`` holds angles in [0, 2pi).  For ``dim == 2`` it
    has shape (N, 2) with columns (colatitude, longitude), stored row-major
    over the (num_lat, num_lon) tensor ``shape``.
    """

    dim: int
    nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int
    shape: tuple
    total_measure: float = field(init=False)
    points: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", _frozen(self.nodes))
        object.__setattr__(self, "weights", _frozen(self.weights))
        object.__setattr__(self, "total_measure", float(self.weights.sum()))
        object.__setattr__(self, "points", _frozen(_embed(self.dim, self.nodes)))

    @property
    def size(self) -> int:
        return self.weights.size

    @property
    def theta(self) -> np.ndarray:
        """Angle (n=1) or colatitude (n=2) of every node."""
        return self.nodes if self.dim == 1 else self.nodes[:, 0]

    @property
    def phi(self) -> np.ndarray:
        if self.dim != 2:
            raise AttributeError("longitude is only defined on S^2")
        return self.nodes[:, 1]

    @property
    def lat_nodes(self) -> np.ndarray:
        """Distinct colatitudes of a sphere grid (length num_lat)."""
        return self.theta.reshape(self.shape)[:, 0]

    @property
    def lon_nodes(self) -> np.ndarray:
        return self.phi.reshape(self.shape)[0, :]

    @property
    def spacing(self) -> float:
        """Largest gap between neighbouring nodes, in geodesic distance."""
        if self.dim == 1:
            return 2.0 * np.pi / self.size
        lat = self.lat_nodes
        gaps = np.diff(np.concatenate([[0.0], lat, [np.pi]]))
        return float(max(gaps.max(), 2.0 * np.pi / self.shape[1]))


def _embed(dim, nodes):
    if dim == 1:
        return np.column_stack([np.cos(nodes), np.sin(nodes)])
    th, ph = nodes[:, 0], nodes[:, 1]
    st = np.sin(th)
    return np.column_stack([st * np.cos(ph), st * np.sin(ph), np.cos(th)])


def make_circle_grid(num_nodes: int) -> QuadratureGrid:
    """Uniform rule on S^1: theta_j = 2 pi j / N, weights 2 pi / N."""
    num_nodes = int(num_nodes)
    if num_nodes < 4:
        raise ValueError(f"circle grid needs at least 4 nodes, got {num_nodes}")
    theta = 2.0 * np.pi * np.arange(num_nodes) / num_nodes
    weights = np.full(num_nodes, 2.0 * np.pi / num_nodes)
    return QuadratureGrid(1, theta, weights, num_nodes - 1, (num_nodes,))


def make_sphere_grid(num_lat: int, num_lon: int) -> QuadratureGrid:
    """Gauss-Legendre (in cos colatitude) x uniform longitude rule on S^2.

    Latitude rows are ordered from the north pole southwards.
    """
    num_lat, num_lon = int(num_lat), int(num_lon)
    if num_lat < 2 or num_lon < 4:
        raise ValueError(
            f"sphere grid needs num_lat >= 2 and num_lon >= 4, got ({num_lat}, {num_lon})"
        )
    x, wx = roots_legendre(num_lat)
    x, wx = x[::-1], wx[::-1]
    theta = np.arccos(x)
    phi = 2.0 * np.pi * np.arange(num_lon) / num_lon
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    weights = np.outer(wx, np.full(num_lon, 2.0 * np.pi / num_lon))
    exact = min(2 * num_lat - 1, num_lon - 1)
    return QuadratureGrid(
        2, np.column_stack([th.ravel(), ph.ravel()]), weights.ravel(), exact, (num_lat, num_lon)
    )


@dataclass(frozen=True)
class SolidGrid:
    """Tensor rule on the unit disk/ball: radial Gauss-Jacobi x boundary grid.

    ``radial_weights`` integrate against r^n dr on (0, 1), so they sum to
    1/(n+1) and ``sum_i w_i g(r_i)`` equals ``int_0^1 g(r) r^n dr`` for
    polynomial g of degree < 2 * len(radial_nodes).
    """

    boundary: QuadratureGrid
    radial_nodes: np.ndarray
    radial_weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "radial_nodes", _frozen(self.radial_nodes))
        object.__setattr__(self, "radial_weights", _frozen(self.radial_weights))

    @property
    def dim(self) -> int:
        return self.boundary.dim

    @property
    def volume(self) -> float:
        return float(self.radial_weights.sum() * self.boundary.total_measure)


def make_solid_grid(boundary: QuadratureGrid, num_radial: int) -> SolidGrid:
    if num_radial < 1:
        raise ValueError("num_radial must be positive")
    n = boundary.dim
    x, w = roots_jacobi(int(num_radial), 0.0, float(n))
    # (1+x)^n dx on [-1,1]  ->  r^n dr on [0,1] with r = (1+x)/2
    r = 0.5 * (1.0 + x)
    w = w / 2.0 ** (n + 1)
    return SolidGrid(boundary, r, w)


def _angle(u, v):
    # arctan2 form keeps full precision for nearly (anti)parallel vectors
    cross = np.linalg.norm(np.cross(u, v), axis=-1)
    return np.arctan2(cross, np.sum(u * v, axis=-1))


def _circle_gap(a, b):
    d = np.abs(a - b) % (2.0 * np.pi)
    return np.minimum(d, 2.0 * np.pi - d)


def geodesic_distance(grid: QuadratureGrid, i: int, j: int) -> float:
    n = grid.size
    if not (-n <= i < n and -n <= j < n):
        raise IndexError(f"node index out of range for grid of size {n}")
    if grid.dim == 1:
        return float(_circle_gap(grid.nodes[i], grid.nodes[j]))
    return float(_angle(grid.points[i], grid.points[j]))


def distances_from(grid: QuadratureGrid, i: int) -> np.ndarray:
    """Geodesic distances from node ``i`` to every node."""
    if grid.dim == 1:
        return _circle_gap(grid.nodes, grid.nodes[i])
    return _angle(grid.points, grid.points[i][None, :])


def distance_matrix(grid: QuadratureGrid, rows=None) -> np.ndarray:
    """Pairwise geodesic distances; ``rows`` restricts the source nodes."""
    rows = np.arange(grid.size) if rows is None else np.atleast_1d(rows)
    if grid.dim == 1:
        return _circle_gap(grid.nodes[rows][:, None], grid.nodes[None, :])
    return np.stack([distances_from(grid, i) for i in rows])


def _check_p(p):
    if not (p == np.inf or p >= 1):
        raise ValueError(f"p must be >= 1 or inf, got {p}")


def lp_norm(values, grid: QuadratureGrid, p):
    """Discrete L^p norm (sum_j w_j |v_j|^p)^(1/p); p = inf gives max |v_j|.

    A 2-d ``values`` array is treated as a stack of functions (one per row).
    """
    _check_p(p)
    v = np.abs(np.asarray(values))
    if v.shape[-1] != grid.size:
        raise ValueError(f"expected {grid.size} nodal values, got {v.shape[-1]}")
    if p == np.inf:
        out = v.max(axis=-1)
    else:
        # scale out the max to keep |v|^p in range
        m = v.max(axis=-1, keepdims=True)
        m = np.where(m > 0, m, 1.0)
        out = m[..., 0] * (((v / m) ** p) @ grid.weights) ** (1.0 / p)
    return float(out) if np.ndim(out) == 0 else out


def solid_values(components, solid: SolidGrid, degrees=None) -> np.ndarray:
    """Values of sum_k r^k c_k(omega) on the radial nodes (plus r = 1).

    ``components[k]`` holds the degree-``degrees[k]`` boundary component as
    nodal values.  Returns an array of shape (num_radial + 1, N); the last
    row is the trace at r = 1.
    """
    comp = np.asarray(components)
    if degrees is None:
        degrees = np.arange(comp.shape[0])
    degrees = np.asarray(degrees, dtype=float)
    r = np.append(solid.radial_nodes, 1.0)
    return (r[:, None] ** degrees[None, :]) @ comp


def solid_lp_norm(components, solid: SolidGrid, p, degrees=None) -> float:
    """L^p norm over the ball of u(r, w) = sum_k r^k c_k(w).

    For finite p the tensor rule is used; for p = inf the maximum over the
    radial nodes and the boundary r = 1 (where a harmonic function attains
    it) is returned.
    """
    _check_p(p)
    comp = np.asarray(components)
    if comp.shape[-1] != solid.boundary.size:
        raise ValueError(
            f"expected components over {solid.boundary.size} nodes, got {comp.shape[-1]}"
        )
    vals = solid_values(comp, solid, degrees)
    return solid_lp_norm_of_values(vals, solid, p)


def solid_lp_norm_of_values(vals, solid: SolidGrid, p) -> float:
    """L^p norm of values laid out as returned by :func:`solid_values`."""
    _check_p(p)
    v = np.abs(vals)
    if p == np.inf:
        return float(v.max())
    interior = v[:-1]
    m = interior.max()
    if m == 0:
        return 0.0
    s = solid.radial_weights @ ((interior / m) ** p) @ solid.boundary.weights
    return float(m * s ** (1.0 / p))
