import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from steklov.geometry import distances_from
from steklov.harmonics import build_basis
from steklov.heat import (
    base_heat_kernel,
    chapman_kolmogorov_defect,
    check_3p,
    circle_poisson_kernel,
    crossing_distance,
    extend_semigroup,
    heat_kernel_grid,
    kato_modulus,
    picard_heat_kernel,
    picard_t0,
    q_alpha,
    required_degree,
    spectral_heat_kernel,
    three_p_ratio,
    time_integral_q,
    two_sided_bound_report,
)
from steklov.potentials import make_potential

# c(t) for V = 1, alpha = 1 on the circle (mpmath double integral, 20 digits)
KATO_V1_0125 = 0.49502640802837827076
KATO_V1_05 = 1.9204225284540523321


def test_q_examples():
    assert q_alpha(1.0, 1, 1.0, 0.0) == 1.0
    assert q_alpha(1.0, 1, 0.5, 1.0) == 0.5
    assert q_alpha(1.0, 2, 0.25, 0.0) == 16.0
    assert q_alpha(0.5, 1, 0.25, 2.0) == pytest.approx(0.25 * 2.0**-1.5)
    with pytest.raises(ValueError):
        q_alpha(1.0, 1, 0.0, 1.0)
    with pytest.raises(ValueError):
        q_alpha(1.0, 1, 1.0, -0.1)


@given(st.floats(0.1, 1.9), st.sampled_from([1, 2]), st.floats(1e-3, 1.0))
def test_q_continuous_at_crossing(alpha, n, t):
    d = crossing_distance(alpha, n, t)
    assert t * d ** (-n - alpha) == pytest.approx(t ** (-n / alpha), rel=1e-10)
    lo, hi = q_alpha(alpha, n, t, d * (1 - 1e-9)), q_alpha(alpha, n, t, d * (1 + 1e-9))
    assert lo == pytest.approx(hi, rel=1e-6)


@given(st.floats(0.2, 1.8), st.sampled_from([1, 2]), st.floats(0.01, 1.0), st.floats(0.01, 3.0))
def test_time_integral_matches_quadrature(alpha, n, t, d):
    from scipy.integrate import quad

    ref = quad(lambda r: q_alpha(alpha, n, r, d), 0, t, points=[min(d**alpha, t)], epsrel=1e-11)[0]
    assert time_integral_q(alpha, n, t, np.array([d]))[0] == pytest.approx(ref, rel=1e-7)


def test_required_degree_and_tail_check():
    K = required_degree(1.0, 2.0**-7)
    assert np.exp(-(2.0**-7) * K) < 1e-14
    assert np.exp(-(2.0**-7) * (K - 2)) >= 1e-14
    with pytest.raises(ValueError):
        base_heat_kernel(1.0, build_basis(1, 16), 0.01)
    with pytest.raises(ValueError):
        base_heat_kernel(2.0, build_basis(1, 16), 1.0)


def test_base_kernel_matches_poisson():
    t = 0.125
    b = build_basis(1, required_degree(1.0, t))
    P = base_heat_kernel(1.0, b, t, rows=[0, 7])
    for i, r in enumerate([0, 7]):
        ref = circle_poisson_kernel(t, distances_from(b.grid, r))
        assert np.abs(P[i] - ref).max() < 1e-12 * ref.max()


@pytest.mark.parametrize("dim,alpha", [(1, 0.5), (1, 1.5), (2, 1.0)])
def test_base_kernel_mass_symmetry_positivity(dim, alpha):
    t = 0.5
    K = min(required_degree(alpha, t), 120 if dim == 1 else 48)
    b = build_basis(dim, K)
    P = base_heat_kernel(alpha, b, t, check_tail=False)
    assert np.abs(P @ b.grid.weights - 1.0).max() < 1e-10
    assert np.abs(P - P.T).max() < 1e-10 * P.max()
    if alpha <= 1:
        assert P.min() > 0


def test_large_time_equilibrium():
    b = build_basis(2, 12)
    P = base_heat_kernel(1.0, b, 40.0)
    assert np.abs(P - 1 / (4 * np.pi)).max() < 1e-14


def test_constant_potential_closed_form():
    b = build_basis(1, 24)
    V = make_potential("constant:0.7", b.grid)
    P = spectral_heat_kernel(V, 1.0, b, 0.5)
    P0 = base_heat_kernel(1.0, b, 0.5, check_tail=False)
    assert np.abs(P - np.exp(-0.35) * P0).max() < 1e-12


@pytest.mark.parametrize("spec", ["constant:0.7", "cos-lowfreq"])
def test_picard_matches_expm(spec):
    b = build_basis(1, 24)
    V = make_potential(spec, b.grid)
    res = picard_heat_kernel(V, 1.0, b, 0.25, check_tail=False)
    ref = spectral_heat_kernel(V, 1.0, b, 0.25)
    assert res.converged
    assert res.contraction < 1
    assert np.abs(res.kernel - ref).max() < 1e-9 * np.abs(ref).max()


def test_picard_zero_potential_has_no_correction(circle16):
    V = make_potential("zero", circle16.grid)
    res = picard_heat_kernel(V, 1.0, circle16, 0.5, check_tail=False)
    assert all(x == 0 for x in res.theta_norms[1:])
    assert np.abs(res.kernel - base_heat_kernel(1.0, circle16, 0.5, check_tail=False)).max() < 1e-14


def test_picard_refuses_divergent_series(circle16):
    V = make_potential("cos-lowfreq:amp=40", circle16.grid)
    with pytest.raises(RuntimeError):
        picard_heat_kernel(V, 1.0, circle16, 1.0, check_tail=False)


def test_picard_t0_ratios_grow():
    b = build_basis(1, 16)
    V = make_potential("cos-lowfreq", b.grid)
    t0, ratios = picard_t0(V, 1.0, b, [0.0625, 0.125, 0.25])
    r = [ratios[t] for t in sorted(ratios)]
    assert t0 == 0.25
    assert r[0] < r[1] < r[2] <= 1 / 3


def test_semigroup_extension():
    b = build_basis(1, 40)
    t = 0.5
    P = base_heat_kernel(1.0, b, t, check_tail=False)
    kg = extend_semigroup(P, b.grid, t, 2)
    assert kg.times == [0.5, 1.0, 2.0]
    assert np.array_equal(extend_semigroup(P, b.grid, t, 0).kernels[0.5], P)
    for tt in (1.0, 2.0):
        ref = base_heat_kernel(1.0, b, tt, check_tail=False)
        assert np.abs(kg.kernels[tt] - ref).max() < 1e-12
    assert chapman_kolmogorov_defect(P, kg.kernels[1.0], b.grid.weights) < 1e-13
    with pytest.raises(ValueError):
        extend_semigroup(P[:3], b.grid, t, 1)


def test_negative_constant_growth():
    b = build_basis(1, required_degree(1.0, 0.25))
    kg = heat_kernel_grid(make_potential("constant:-3", b.grid), 1.0, b, [0.25], rows=[0])
    base = base_heat_kernel(1.0, b, 0.25, rows=[0])
    assert kg.provenance == "closed-form"
    assert kg.kernels[0.25].max() / base.max() == pytest.approx(np.exp(0.75), rel=1e-13)


def test_two_sided_report_circle():
    t = 2.0**-5
    b = build_basis(1, required_degree(1.0, t))
    kg = heat_kernel_grid(None, 1.0, b, [t], rows=np.arange(0, b.grid.size, 64))
    sups, infs = two_sided_bound_report(kg)
    assert 0 < infs[t] <= sups[t] < 10
    assert "sup_ratio" in kg.diagnostics


def test_3p_diagonal_value():
    for alpha, n in [(0.5, 1), (1.0, 2), (1.5, 2)]:
        r = three_p_ratio(alpha, n, 0.3, 0.3, 0.0, 0.0, 0.0)
        assert r == pytest.approx(2 ** (n / alpha - 1), rel=1e-12)


def test_check_3p_finite_and_reproducible():
    a = check_3p(1.0, 1, 20_000, seed=5)
    b = check_3p(1.0, 1, 20_000, seed=5)
    assert a == b
    assert np.isfinite(a.constant) and a.constant >= 0.5
    with pytest.raises(ValueError):
        check_3p(2.5, 1, 10)


def test_kato_zero_and_constant():
    b = build_basis(1, 16)
    km0 = kato_modulus(make_potential("zero", b.grid), 1.0, [0.125, 0.5])
    assert np.all(km0.values == 0)
    km = kato_modulus(make_potential("constant:1", b.grid), 1.0, [0.125, 0.5])
    assert km.values[0] == pytest.approx(KATO_V1_0125, rel=1e-8)
    assert km.values[1] == pytest.approx(KATO_V1_05, rel=1e-8)


def test_kato_monotone_and_vanishing():
    b = build_basis(1, 16)
    V = make_potential("cos-lowfreq", b.grid)
    km = kato_modulus(V, 1.0, [2.0**-j for j in range(3, 8)], max_points=8)
    assert km.monotone and km.vanishes_at_zero()
