import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from steklov.geometry import (
    geodesic_distance,
    lp_norm,
    make_circle_grid,
    make_solid_grid,
    make_sphere_grid,
    solid_lp_norm,
)
from steklov.harmonics import build_basis

# frozen independently (mpmath, 30 digits): sqrt(pi) / sqrt(10)
DISK_R4_COS4_L2 = 0.560499121639792869931128243387
WRAP_GAP = 0.183185307179586476925286766558  # 2 pi - 6.1


def test_circle_grid_uniform_weights():
    g = make_circle_grid(4)
    assert np.allclose(g.weights, np.pi / 2)
    assert g.total_measure == pytest.approx(2 * np.pi, rel=1e-12)


def test_circle_grid_integrates_cos_squared():
    g = make_circle_grid(256)
    assert g.weights @ np.cos(8 * g.nodes) ** 2 == pytest.approx(np.pi, abs=1e-12)


def test_circle_grid_rejects_tiny():
    with pytest.raises(ValueError):
        make_circle_grid(3)


def test_sphere_grid_total_measure():
    g = make_sphere_grid(2, 4)
    assert g.total_measure == pytest.approx(4 * np.pi, rel=1e-12)
    with pytest.raises(ValueError):
        make_sphere_grid(1, 4)


def test_sphere_grid_orthonormality_y10_3():
    g = make_sphere_grid(64, 128)
    b = build_basis(2, 10, g)
    c = np.zeros(b.num_modes)
    c[b.index(10, 3)] = 1.0
    v = b.synthesize(c)
    assert g.weights @ v**2 == pytest.approx(1.0, abs=1e-10)


def test_geodesic_examples():
    g = make_circle_grid(4)
    assert geodesic_distance(g, 0, 2) == pytest.approx(np.pi)
    gs = make_sphere_grid(2, 4)
    assert geodesic_distance(gs, 0, 0) == 0.0
    with pytest.raises(IndexError):
        geodesic_distance(g, 0, 10)


def test_geodesic_wraparound():
    from steklov.geometry import QuadratureGrid

    g = QuadratureGrid(1, np.array([0.1, 6.2]), np.array([np.pi, np.pi]), 1, (2,))
    assert geodesic_distance(g, 0, 1) == pytest.approx(WRAP_GAP, abs=1e-12)


@given(st.integers(0, 47), st.integers(0, 47), st.integers(0, 47))
def test_triangle_inequality_on_sphere(i, j, k):
    g = make_sphere_grid(4, 12)
    dij, djk, dik = geodesic_distance(g, i, j), geodesic_distance(g, j, k), geodesic_distance(g, i, k)
    assert dik <= dij + djk + 1e-12
    assert dij == pytest.approx(geodesic_distance(g, j, i))


def test_lp_norm_examples():
    g = make_circle_grid(64)
    assert lp_norm(np.ones(64), g, 2) == pytest.approx(np.sqrt(2 * np.pi))
    for k in (1, 3, 7):
        assert lp_norm(np.cos(k * g.nodes), g, np.inf) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        lp_norm(np.ones(64), g, 0.5)
    with pytest.raises(ValueError):
        lp_norm(np.ones(10), g, 2)


def test_l1_of_cosine_is_four():
    # |cos k theta| is not a trig polynomial; a fine grid resolves it to O(h^2)
    g = make_circle_grid(20000)
    for k in (1, 2, 5):
        assert lp_norm(np.cos(k * g.nodes), g, 1) == pytest.approx(4.0, rel=1e-6)


@given(st.lists(st.floats(-10, 10), min_size=16, max_size=16), st.sampled_from([(1, 2), (2, 4), (2, np.inf)]))
def test_holder_consistency(vals, pq):
    g = make_circle_grid(16)
    p, q = pq
    v = np.array(vals)
    lhs = lp_norm(v, g, p)
    rhs = g.total_measure ** (1 / p - (0 if q == np.inf else 1 / q)) * lp_norm(v, g, q)
    assert lhs <= rhs * (1 + 1e-12) + 1e-300


@given(st.lists(st.floats(0, 5), min_size=16, max_size=16), st.floats(1.0, 2.0))
def test_lp_norm_monotone(vals, scale):
    g = make_circle_grid(16)
    v = np.array(vals)
    assert lp_norm(v, g, 3) <= lp_norm(scale * v, g, 3) * (1 + 1e-12)


def test_solid_grid_radial_measure():
    for n, grid in ((1, make_circle_grid(8)), (2, make_sphere_grid(4, 8))):
        s = make_solid_grid(grid, 6)
        assert s.radial_weights.sum() == pytest.approx(1.0 / (n + 1), abs=1e-12)


def test_solid_lp_norm_disk_examples():
    g = make_circle_grid(64)
    s = make_solid_grid(g, 12)
    comps = np.zeros((5, 64))
    comps[4] = np.cos(4 * g.nodes)
    assert solid_lp_norm(comps, s, 2) == pytest.approx(DISK_R4_COS4_L2, abs=1e-12)
    assert solid_lp_norm(np.ones((1, 64)), s, 2) == pytest.approx(np.sqrt(np.pi), abs=1e-12)
    assert solid_lp_norm(comps, s, np.inf) == pytest.approx(1.0)
