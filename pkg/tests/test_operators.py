import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from steklov.harmonics import build_basis, zonal_harmonic
from steklov.geometry import distances_from, lp_norm
from steklov.operators import (
    apply_multiplier,
    assemble_dtn,
    assemble_multiplication,
    assemble_order_zero,
    assemble_sqrt_laplacian,
    cluster_projector,
    composite,
    dirichlet_kernel,
    exact_norm_2_to_inf,
    lp_bump,
    multiplier_kernel,
    operator_norm_2_to_p,
    projector_from_vectors,
    resolvent_norm,
)
from steklov.potentials import make_potential

P0_K10 = -0.488088481701515469914535136799  # 10 - sqrt(110), mpmath


def test_dtn_and_sqrt_laplacian(circle16, sphere12):
    D = assemble_dtn(circle16)
    assert D.diagonal[circle16.index(7, 7)] == 7
    assert assemble_dtn(sphere12).diagonal[0] == 0
    S = assemble_sqrt_laplacian(sphere12)
    assert np.allclose(S.diagonal, np.sqrt(sphere12.degrees * (sphere12.degrees + 1.0)))


def test_order_zero_remainder():
    b = build_basis(2, 40)
    P0 = assemble_order_zero(b)
    assert P0.diagonal[b.index(10, 0)] == pytest.approx(P0_K10, abs=1e-14)
    assert np.abs(P0.diagonal).max() <= 0.5 + 0.01
    assert np.abs(assemble_order_zero(build_basis(1, 20)).diagonal).max() == 0.0


def test_multiplication_constant(circle16):
    M = assemble_multiplication(make_potential("constant:2.5", circle16.grid), circle16)
    assert np.allclose(M.matrix, 2.5 * np.eye(circle16.num_modes))


def test_multiplication_cos_selection_rule(circle16):
    M = assemble_multiplication(make_potential("cos-lowfreq", circle16.grid), circle16).matrix
    deg = circle16.degrees
    off = np.abs(deg[:, None] - deg[None, :]) != 1
    assert np.abs(M[off]).max() < 1e-12
    assert np.abs(M - M.T).max() < 1e-12
    # cos(theta) cos(k theta) = (cos((k-1)theta) + cos((k+1)theta)) / 2
    assert M[circle16.index(3, 3), circle16.index(4, 4)] == pytest.approx(0.5, abs=1e-12)


def test_multiplication_random_symmetric(sphere12):
    V = make_potential("random-lipschitz:seed=4", sphere12.grid)
    M = assemble_multiplication(V, sphere12)
    assert M.symmetry_defect < 1e-12


def test_composite_spectrum_bounded_below(circle16):
    V = make_potential("cos-lowfreq:amp=2.0", circle16.grid)
    A = composite(assemble_dtn(circle16), assemble_multiplication(V, circle16))
    w, _ = A.spectrum
    assert w.min() >= -2.0 - 1e-12


def test_multiplier_identity_and_calculus(circle16, rng):
    f = rng.standard_normal(circle16.num_modes)
    assert np.allclose(apply_multiplier(lambda s: np.ones_like(s), 1.0, circle16, f), f)
    m1 = lambda s: np.exp(-s)
    m2 = lambda s: 1.0 / (1.0 + s**2)
    a = apply_multiplier(m1, 2.0, circle16, apply_multiplier(m2, 2.0, circle16, f))
    b = apply_multiplier(lambda s: m1(s) * m2(s), 2.0, circle16, f)
    assert np.abs(a - b).max() < 1e-14


def test_bump_support():
    b = build_basis(1, 64)
    f = np.ones(b.num_modes)
    for ell in (2, 3, 4):
        g = apply_multiplier(lp_bump(ell), 1.0, b, f)
        lam = b.sqrt_eigenvalue
        outside = (lam <= 2 ** (ell - 1)) | (lam >= 2 ** (ell + 1))
        assert np.all(g[outside] == 0)


@given(st.integers(0, 2**31 - 1))
def test_partition_of_unity(seed):
    b = build_basis(1, 60)
    f = np.random.default_rng(seed).standard_normal(b.num_modes)
    total = sum(apply_multiplier(lp_bump(ell), 1.0, b, f) for ell in range(0, 8))
    assert np.abs(total - f).max() < 1e-10


def test_reproducing_kernel_is_dirichlet():
    b = build_basis(1, 32)
    K = multiplier_kernel(lambda s: np.ones_like(s), 1.0, b, rows=[0])[0]
    d = distances_from(b.grid, 0)
    assert np.abs(K - dirichlet_kernel(32, d)).max() < 1e-12


def test_heat_multiplier_kernel_positive():
    b = build_basis(1, 64)
    K = multiplier_kernel(lambda s: np.exp(-s), 4.0, b)
    assert K.min() > 0
    assert np.abs(K - K.T).max() < 1e-12


def test_cluster_projector_rank_and_idempotence(circle16):
    P = cluster_projector(assemble_dtn(circle16), 7)
    assert P.rank == 2
    M = P.matrix
    assert np.abs(M @ M - M).max() < 1e-12
    empty = cluster_projector(assemble_dtn(circle16), 7.5, width=0.25)
    assert empty.info["empty"]


def test_cluster_projector_commutes(circle16):
    V = make_potential("cos-lowfreq", circle16.grid)
    A = composite(assemble_dtn(circle16), assemble_multiplication(V, circle16))
    P = cluster_projector(A, 5.0).matrix
    assert np.abs(A.matrix @ P - P @ A.matrix).max() < 1e-9


def test_norm_of_constant_projector(circle16):
    c = np.zeros((circle16.num_modes, 1))
    c[0, 0] = 1.0
    P = projector_from_vectors(circle16, c)
    assert exact_norm_2_to_inf(P) == pytest.approx(1 / np.sqrt(2 * np.pi), abs=1e-14)
    est = operator_norm_2_to_p(P, np.inf)
    assert est.value == pytest.approx(1 / np.sqrt(2 * np.pi), rel=1e-6)


def test_rank_one_zonal_norm(sphere12):
    u = sphere12.analyze(zonal_harmonic(sphere12, 6))
    P = projector_from_vectors(sphere12, u)
    est = operator_norm_2_to_p(P, 4.0)
    assert est.value == pytest.approx(lp_norm(sphere12.synthesize(u), sphere12.grid, 4), rel=1e-6)


def test_cluster_norm_addition_theorem():
    b = build_basis(2, 24)
    D = assemble_dtn(b)
    for k in (3, 10, 24):
        v = exact_norm_2_to_inf(cluster_projector(D, k))
        assert v == pytest.approx(np.sqrt((2 * k + 1) / (4 * np.pi)), abs=1e-12)


def test_norm_estimate_is_lower_bound_with_diagnostics(sphere12):
    P = cluster_projector(assemble_dtn(sphere12), 8)
    est = operator_norm_2_to_p(P, 6.0, starts=8, seed=1)
    assert est.starts >= 8 and est.iterations >= 1
    assert est.value <= exact_norm_2_to_inf(P) * np.sqrt(4 * np.pi) ** (1 / 6) + 1e-12


def test_resolvent_properties():
    b = build_basis(2, 24)
    S = assemble_sqrt_laplacian(b)
    on = resolvent_norm(S, float(np.sqrt(10 * 11)), 4.0)
    assert np.isfinite(on.value)
    # far from the spectrum the L2 -> L4 norm is controlled by the gap times the
    # largest cluster sup, sqrt(2k+1 / 4 pi) at k = 24 summed over all clusters
    far = resolvent_norm(S, 60.0, 4.0)
    near = resolvent_norm(S, float(np.sqrt(20 * 21)) + 0.05, 4.0)
    assert far.value < near.value
    with pytest.raises(ValueError):
        resolvent_norm(S, 10.0, 8.0)
    with pytest.raises(ValueError):
        resolvent_norm(S, 0.5, 4.0)
