import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from steklov.geometry import lp_norm
from steklov.harmonics import (
    build_basis,
    default_grid,
    highest_weight_harmonic,
    refined_sup_norm,
    zonal_harmonic,
)
from steklov.fitting import fit_exponent

SQRT12 = 3.46410161513775458705489268301


def test_mode_counts():
    assert build_basis(1, 8).num_modes == 17
    assert build_basis(2, 10).num_modes == 121


def test_eigenvalue_table(sphere12):
    i = sphere12.index(3, 0)
    assert sphere12.sqrt_eigenvalue[i] == pytest.approx(SQRT12, abs=1e-14)
    assert sphere12.laplace_eigenvalue[i] == 12.0


def test_multiplicities(circle16, sphere12):
    assert np.sum(circle16.degrees == 0) == 1
    assert all(np.sum(circle16.degrees == k) == 2 for k in range(1, 17))
    assert all(np.sum(sphere12.degrees == k) == 2 * k + 1 for k in range(13))


def test_insufficient_grid_rejected():
    with pytest.raises(ValueError):
        build_basis(2, 10, default_grid(2, 5))


@pytest.mark.parametrize("dim,K", [(1, 16), (2, 12)])
def test_orthonormal_under_quadrature(dim, K):
    b = build_basis(dim, K)
    S = b.synthesize(np.eye(b.num_modes))
    G = (S * b.grid.weights) @ S.T
    assert np.abs(G - np.eye(b.num_modes)).max() < 1e-10


def test_round_trip_unit_mode(circle16):
    c = np.zeros(circle16.num_modes)
    c[circle16.index(5, 5)] = 1.0
    assert np.allclose(circle16.analyze(circle16.synthesize(c)), c, atol=1e-12)


def test_analyze_two_term_signal(circle16):
    th = circle16.grid.nodes
    c = circle16.analyze(np.cos(3 * th) + 0.5 * np.sin(7 * th))
    nz = np.flatnonzero(np.abs(c) > 1e-12)
    assert set(nz) == {circle16.index(3, 3), circle16.index(7, -7)}


def test_aliasing_flagged(circle16):
    # on the native grid cos(30 theta) aliases onto cos(4 theta); sampling on
    # the doubled grid exposes the energy above K
    fine = circle16.with_grid(default_grid(1, 16, oversample=2))
    th = fine.grid.nodes
    assert fine.energy_leak(np.cos(3 * th)) < 1e-20
    assert fine.energy_leak(np.cos(30 * th)) > 0.9
    coarse = circle16.grid.nodes
    assert circle16.energy_leak(np.cos(30 * coarse)) < 1e-12


@given(st.integers(0, 2**31 - 1))
def test_parseval_sphere(seed):
    b = build_basis(2, 8)
    c = np.random.default_rng(seed).standard_normal(b.num_modes)
    v = b.synthesize(c)
    assert lp_norm(v, b.grid, 2) == pytest.approx(np.linalg.norm(c), rel=1e-10)
    assert np.allclose(b.analyze(v), c, atol=1e-10)


def test_zonal_examples(sphere12):
    z0 = zonal_harmonic(sphere12, 0)
    assert np.allclose(z0, 1 / np.sqrt(4 * np.pi))
    for k in (1, 5, 12):
        c = sphere12.analyze(zonal_harmonic(sphere12, k))
        pole = sphere12.evaluate(c, np.array([0.0]), np.array([0.0]))
        assert pole.ravel()[0] == pytest.approx(np.sqrt((2 * k + 1) / (4 * np.pi)), abs=1e-10)
        assert np.linalg.norm(c) == pytest.approx(1.0, abs=1e-10)


def test_zonal_circle(circle16):
    th = circle16.grid.nodes
    assert np.allclose(zonal_harmonic(circle16, 4, pole=0.3), np.cos(4 * (th - 0.3)) / np.sqrt(np.pi))


def test_addition_theorem(sphere12):
    for k in (2, 7):
        idx = np.flatnonzero(sphere12.degrees == k)
        S = sphere12.synthesize(np.eye(sphere12.num_modes)[idx])
        assert np.abs((S**2).sum(axis=0) - (2 * k + 1) / (4 * np.pi)).max() < 1e-9


def test_highest_weight(sphere12):
    g = sphere12.grid
    h1 = highest_weight_harmonic(sphere12, 1)
    ref = np.sin(g.theta) * np.cos(g.phi)
    assert abs(np.corrcoef(h1, ref)[0, 1]) == pytest.approx(1.0, abs=1e-12)
    assert lp_norm(highest_weight_harmonic(sphere12, 9), g, 2) == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(ValueError):
        highest_weight_harmonic(build_basis(1, 4), 2)


def test_highest_weight_sup_growth():
    b = build_basis(2, 96)
    pts = []
    for k in (8, 16, 32, 64, 96):
        c = b.analyze(highest_weight_harmonic(b, k))
        pts.append((k, refined_sup_norm(b, c)[0]))
    assert fit_exponent(pts).slope == pytest.approx(0.25, abs=0.05)


def test_laplacian_matches_finite_differences(circle16):
    c = np.zeros(circle16.num_modes)
    c[circle16.index(3, 3)] = 1.0
    c[circle16.index(5, -5)] = 0.5
    th = np.linspace(0, 2 * np.pi, 2001)[:-1]
    h = th[1] - th[0]
    f = circle16.evaluate(c, th)
    fd = (np.roll(f, -1) - 2 * f + np.roll(f, 1)) / h**2
    spec = circle16.evaluate(-circle16.laplace_eigenvalue * c, th)
    assert np.abs(fd - spec).max() < 25 * 25 * h**2


def test_refined_sup_norm_converges(circle16):
    c = np.zeros(circle16.num_modes)
    c[circle16.index(7, 7)] = 1.0
    val, ok = refined_sup_norm(circle16, c)
    assert ok and val == pytest.approx(1 / np.sqrt(np.pi), rel=1e-2)
