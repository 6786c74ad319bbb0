import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from steklov.fitting import dyadic_windows, fit_exponent, window_stability


@given(st.floats(-2, 2), st.floats(0.1, 10))
def test_exact_power_law(s, C):
    lam = np.geomspace(8, 96, 9)
    f = fit_exponent(zip(lam, C * lam**s))
    assert f.slope == pytest.approx(s, abs=1e-10)
    assert f.constant == pytest.approx(C, rel=1e-9)
    assert 0.0 <= f.r_squared <= 1.0


def test_outlier_visible_in_residual():
    lam = np.geomspace(8, 96, 9)
    v = lam**0.5
    v[4] *= 3
    assert fit_exponent(zip(lam, v)).residual_max > 0.5


def test_errors():
    with pytest.raises(ValueError):
        fit_exponent([(1, 1), (2, 2), (3, 3)])
    with pytest.raises(ValueError):
        fit_exponent([(1, 1), (2, -2), (3, 3), (4, 4)])
    with pytest.raises(ValueError):
        fit_exponent([(1, 1), (2, 2), (3, 3), (40, 4)], window=(1, 10))


def test_dyadic_windows_and_stability():
    assert dyadic_windows(8, 64) == [(8, 16), (16, 32), (32, 64)]
    lam = np.arange(8, 129)
    fits, shift = window_stability(zip(lam, lam**1.0), dyadic_windows(8, 128))
    assert len(fits) == 4 and shift < 1e-10
