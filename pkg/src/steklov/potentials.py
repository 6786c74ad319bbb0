"""Boundary potentials V and the named families used by experiments."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .geometry import QuadratureGrid
from .harmonics import build_basis, default_grid

__all__ = [
    "PotentialField",
    "make_potential",
    "parse_potential_spec",
    "zero_potential",
    "constant_potential",
    "cos_potential",
    "random_lipschitz_potential",
    "mesh_lipschitz",
]


@dataclass(frozen=True)
class PotentialField:
    """Nodal values of V on a grid, with an exact evaluator when one exists.

    ``func`` maps angles (theta for n=1; (theta, phi) for n=2, scattered
    points) to values.  Kernels and Kato integrals use it off the grid.
    """

    grid: QuadratureGrid
    values: np.ndarray
    tag: str = "Linfty"
    func: Optional[Callable] = field(default=None, repr=False, compare=False)
    name: str = "custom"
    max_degree: Optional[int] = None
    sup_norm: float = field(init=False)
    lipschitz_estimate: float = field(init=False)

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=float)
        if v.shape != (self.grid.size,):
            raise ValueError("potential must have one value per grid node")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "sup_norm", float(np.abs(v).max()))
        lip = mesh_lipschitz(v, self.grid) if self.tag == "Lipschitz" else float("nan")
        object.__setattr__(self, "lipschitz_estimate", lip)

    def on_grid(self, grid: QuadratureGrid) -> "PotentialField":
        """Resample onto another grid; needs ``func``."""
        if self.func is None:
            raise ValueError("potential has no evaluator; cannot resample")
        if grid.dim == 1:
            vals = self.func(grid.nodes)
        else:
            vals = self.func(grid.theta, grid.phi)
        return PotentialField(grid, vals, self.tag, self.func, self.name, self.max_degree)

    def __call__(self, theta, phi=None):
        if self.func is None:
            raise ValueError("potential has no evaluator")
        return self.func(theta) if self.grid.dim == 1 else self.func(theta, phi)

    @property
    def is_constant(self) -> bool:
        return bool(np.ptp(self.values) == 0.0)


def mesh_lipschitz(values, grid: QuadratureGrid) -> float:
    """max |V(x) - V(y)| / d(x, y) over neighbouring node pairs."""
    v = np.asarray(values)
    if grid.dim == 1:
        dv = np.abs(np.diff(np.append(v, v[0])))
        return float((dv / (2.0 * np.pi / grid.size)).max())
    nlat, nlon = grid.shape
    V = v.reshape(nlat, nlon)
    th = grid.lat_nodes
    # along longitude: chord angle between neighbours on the same row
    dphi = 2.0 * np.pi / nlon
    d_lon = 2.0 * np.arcsin(np.sin(th) * np.sin(dphi / 2.0))
    r_lon = np.abs(np.roll(V, -1, axis=1) - V) / d_lon[:, None]
    r_lat = np.abs(np.diff(V, axis=0)) / np.diff(th)[:, None]
    return float(max(r_lon.max(), r_lat.max()))


def zero_potential(grid: QuadratureGrid) -> PotentialField:
    f = (lambda t: np.zeros_like(np.asarray(t, float))) if grid.dim == 1 else (
        lambda t, p: np.zeros(np.broadcast(np.asarray(t), np.asarray(p)).shape)
    )
    return PotentialField(grid, np.zeros(grid.size), "Lipschitz", f, "zero", 0)


def constant_potential(grid: QuadratureGrid, c: float) -> PotentialField:
    c = float(c)
    f = (lambda t: np.full(np.shape(t), c)) if grid.dim == 1 else (
        lambda t, p: np.full(np.broadcast(np.asarray(t), np.asarray(p)).shape, c)
    )
    return PotentialField(grid, np.full(grid.size, c), "Lipschitz", f, f"constant:{c:g}", 0)


def cos_potential(grid: QuadratureGrid, amp: float = 1.0, freq: int = 1) -> PotentialField:
    """amp * cos(freq * theta); on S^2 theta is the colatitude, so this is
    the Chebyshev polynomial T_freq(z), a harmonic polynomial of degree freq."""
    amp, freq = float(amp), int(freq)
    if grid.dim == 1:
        def f(t):
            return amp * np.cos(freq * np.asarray(t, float))
    else:
        def f(t, p):
            t = np.asarray(t, float)
            return amp * np.cos(freq * t) + 0.0 * np.asarray(p, float)
    vals = f(grid.nodes) if grid.dim == 1 else f(grid.theta, grid.phi)
    return PotentialField(grid, vals, "Lipschitz", f, f"cos-lowfreq:amp={amp:g},freq={freq}", freq)


def random_lipschitz_potential(
    grid: QuadratureGrid, seed: int = 0, lipschitz: float = 1.0, degree: int = 4
) -> PotentialField:
    """Random harmonic series of degrees 1..degree rescaled to a target
    Lipschitz constant sup|grad V| (evaluated on a 16x oversampled grid)."""
    rng = np.random.default_rng(seed)
    basis = build_basis(grid.dim, degree)
    c = rng.standard_normal(basis.num_modes) / (1.0 + basis.degrees) ** 2
    c[0] = 0.0
    # sup |grad V| on a fine grid
    if grid.dim == 1:
        th = np.linspace(0, 2 * np.pi, 64 * (degree + 1), endpoint=False)
        g = np.abs(basis.evaluate_derivatives(c, th, order=1)).max()
    else:
        fine = default_grid(2, degree, oversample=16)
        th, ph = fine.lat_nodes, fine.lon_nodes
        et, ep = basis.evaluate_derivatives(c, th, ph, order=1)
        g = np.sqrt(et**2 + (ep / np.sin(th)[:, None]) ** 2).max()
    c *= float(lipschitz) / g
    if grid.dim == 1:
        def f(t):
            return basis.evaluate(c, np.asarray(t, float))
    else:
        def f(t, p):
            t, p = np.broadcast_arrays(np.asarray(t, float), np.asarray(p, float))
            return (basis.mode_values(t.ravel(), p.ravel()) @ c).reshape(t.shape)
    vals = f(grid.nodes) if grid.dim == 1 else f(grid.theta, grid.phi)
    name = f"random-lipschitz:seed={seed},lip={float(lipschitz):g},degree={degree}"
    return PotentialField(grid, vals, "Lipschitz", f, name, degree)


def parse_potential_spec(spec: str):
    """'name[:k=v,...]' or 'constant:c' -> (name, params dict)."""
    name, _, rest = spec.partition(":")
    name = name.strip()
    params = {}
    if rest:
        for item in rest.split(","):
            if "=" in item:
                k, v = item.split("=", 1)
                params[k.strip()] = float(v) if any(ch in v for ch in ".eE") else int(v)
            else:
                params["c"] = float(item)
    return name, params


_FAMILY_PARAMS = {
    "zero": set(),
    "constant": {"c"},
    "cos-lowfreq": {"amp", "freq"},
    "random-lipschitz": {"seed", "lip", "degree"},
}


def make_potential(spec: str, grid: QuadratureGrid) -> PotentialField:
    """Build a named potential: zero | constant:c | cos-lowfreq[:amp=,freq=]
    | random-lipschitz[:seed=,lip=,degree=]."""
    name, params = parse_potential_spec(spec)
    allowed = _FAMILY_PARAMS.get(name)
    if allowed is None:
        raise ValueError(f"unknown potential family {name!r}")
    extra = set(params) - allowed
    if extra:
        raise ValueError(f"unknown parameter(s) {sorted(extra)} for {name!r}; allowed: {sorted(allowed)}")
    if name == "zero":
        return zero_potential(grid)
    if name == "constant":
        return constant_potential(grid, params.get("c", 1.0))
    if name == "cos-lowfreq":
        return cos_potential(grid, params.get("amp", 1.0), int(params.get("freq", 1)))
    if name == "random-lipschitz":
        return random_lipschitz_potential(
            grid, int(params.get("seed", 0)), params.get("lip", 1.0), int(params.get("degree", 4))
        )
    raise ValueError(f"unknown potential family {name!r}")
