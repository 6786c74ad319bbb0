import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steklov.fitting import fit_exponent
from steklov.harmonics import build_basis, zonal_harmonic
from steklov.potentials import make_potential
from steklov.solver import (
    critical_exponent,
    default_solid,
    dirichlet_apriori_check,
    dyadic_extension_norm,
    extend_harmonically,
    extension_of_coeffs,
    interior_boundary_ratio,
    interior_decay_profile,
    sigma,
    solve_spectrum,
)

RATIO_K4_P2_CIRCLE = 0.316227766016837933199889354443  # 10^(-1/2)
DECAY_09_64 = 0.00117901845777385831715208728614  # 0.9^64


def test_sigma_values():
    assert critical_exponent(2) == 6.0
    assert critical_exponent(1) == np.inf
    assert sigma(2, 2) == 0.0
    assert sigma(4, 2) == pytest.approx(1 / 8)
    assert sigma(6, 2) == pytest.approx(1 / 6)
    assert sigma(np.inf, 2) == pytest.approx(0.5)
    assert sigma(8, 1) == 0.0
    with pytest.raises(ValueError):
        sigma(1.5, 2)


@given(st.floats(2.0, 50.0))
def test_sigma_continuous_and_monotone(p):
    assert sigma(p, 2) <= sigma(p * 1.01, 2) + 1e-15
    assert sigma(p, 2) <= 0.5


def test_free_spectrum_exact(sphere12):
    sp = solve_spectrum(None, sphere12)
    k = np.arange(13)
    assert np.array_equal(sp.values, np.repeat(k, 2 * k + 1).astype(float))
    assert np.all(sp.residuals == 0)
    assert len(sp.cluster(5.0)) == 11


@settings(max_examples=10)
@given(st.floats(-5, 5))
def test_constant_potential_shifts(c):
    b = build_basis(1, 24)
    sp = solve_spectrum(make_potential(f"constant:{c!r}", b.grid), b)
    ref = np.sort(b.degrees).astype(float)
    assert np.abs(sp.values - (ref + c)).max() < 1e-12


def test_cos_potential_converges_in_truncation():
    lows = []
    for K in (128, 192):
        b = build_basis(1, K)
        sp = solve_spectrum(make_potential("cos-lowfreq", b.grid), b)
        lows.append(sp.values[:40])
        assert np.all(sp.residuals[:40] < 1e-10)
        assert not sp.contaminated[:40].any()
    assert np.abs(lows[0] - lows[1]).max() < 1e-10


def test_symmetric_residuals_small_random(sphere12):
    V = make_potential("random-lipschitz:seed=2", sphere12.grid)
    sp = solve_spectrum(V, sphere12)
    ok = ~sp.contaminated
    assert ok.sum() > 20
    assert sp.values[0] >= -V.sup_norm - 1e-12


def test_window_solve_matches_full_for_free():
    b = build_basis(2, 20)
    sp = solve_spectrum(None, b, degree_window=(8, 12), select=(9, 11))
    assert np.array_equal(np.unique(sp.values), [9.0, 10.0])
    assert sp.vectors.shape == (b.num_modes, 19 + 21)


def test_weyl_counting_slope():
    for dim, K in ((1, 128), (2, 48)):
        b = build_basis(dim, K)
        vals = solve_spectrum(None, b).values
        lam = np.arange(8, K - 2, 2, dtype=float)
        counts = np.searchsorted(vals, lam, side="right")
        # N(lambda) = 2 lambda + 1 on the circle and (lambda + 1)^2 on S^2
        assert fit_exponent(zip(lam + dim / 2, counts)).slope == pytest.approx(dim, abs=1e-9)


def test_pure_mode_ratio_closed_form():
    b = build_basis(1, 16)
    c = np.zeros(b.num_modes)
    c[b.index(4, 4)] = 1.0
    prof = extension_of_coeffs(b, c, p_list=(2,))
    assert interior_boundary_ratio(prof, 2) == pytest.approx(RATIO_K4_P2_CIRCLE, rel=1e-12)


@pytest.mark.parametrize("p", [2.0, 4.0, 6.0])
def test_pure_mode_ratio_sphere(p):
    b = build_basis(2, 10)
    u = b.analyze(zonal_harmonic(b, 7))
    prof = extension_of_coeffs(b, u, default_solid(b, p), p_list=(p,))
    assert interior_boundary_ratio(prof, p) == pytest.approx((7 * p + 3) ** (-1 / p), rel=1e-9)


def test_interior_decay_exact():
    b = build_basis(1, 64)
    c = np.zeros(b.num_modes)
    c[b.index(64, 64)] = 1.0
    prof = extension_of_coeffs(b, c, p_list=(), deltas=(0.0, 0.1))
    assert prof.sup_within(0.1) / prof.sup_within(0.0) == pytest.approx(DECAY_09_64, rel=1e-10)
    dp = interior_decay_profile(prof, [0.02, 0.05, 0.1], lam=64.0)
    assert dp.rate == pytest.approx(-np.log(0.9) / 0.1, rel=0.05)
    with pytest.raises(ValueError):
        prof.sup_within(1.0)


def test_sup_is_on_boundary(circle16, rng):
    sp = solve_spectrum(make_potential("cos-lowfreq", circle16.grid), circle16)
    prof = extend_harmonically(sp[9], p_list=(np.inf,), deltas=(0.0, 0.2))
    assert prof.sup_within(0.2) <= prof.sup_within(0.0) + 1e-14


def test_dirichlet_constant_mode():
    b = build_basis(1, 8)
    c = np.zeros(b.num_modes)
    c[0] = 1.0
    u, f = dirichlet_apriori_check(c, b)
    assert f == pytest.approx(1.0)
    assert u == pytest.approx(np.sqrt(0.5), rel=1e-12)


@settings(max_examples=10)
@given(st.integers(0, 2**31 - 1))
def test_dirichlet_bound_random(seed):
    b = build_basis(2, 12)
    f = np.random.default_rng(seed).standard_normal(b.num_modes)
    u, h = dirichlet_apriori_check(f, b)
    assert u <= h * (1 + 1e-9)


def test_dyadic_norm_exact_at_p2_and_lower_bound():
    b = build_basis(1, 40)
    v, conv, it = dyadic_extension_norm(3, 2.0, b)
    assert conv and it == 0
    k = b.degrees
    beta = np.max(np.where((k > 4) & (k < 16), 1, 0))
    assert 0 < v <= beta / np.sqrt(2 * 5 + 2) + 1e-12
    v4, conv4, _ = dyadic_extension_norm(3, 4.0, b, seed=3)
    assert np.isfinite(v4) and v4 > 0
    with pytest.raises(ValueError):
        dyadic_extension_norm(6, 4.0, b)
