"""Log-log exponent fits for growth laws value ~ C lambda^s."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["ExponentFit", "fit_exponent", "dyadic_windows", "window_stability"]


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    r_squared: float
    residual_max: float
    window: tuple
    points: tuple

    @property
    def constant(self) -> float:
        return float(np.exp(self.intercept))

    def as_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "residual_max": self.residual_max,
            "window": list(self.window),
            "num_points": len(self.points),
        }


def fit_exponent(points, window=None, base: float = np.e) -> ExponentFit:
    """Ordinary least squares of log(value) against log(lambda).

    Parameters
    ----------
    points : iterable of (lambda, value)
    window : (lo, hi), optional
        Keep points with lo <= lambda <= hi.
    base : float
        Logarithm base; the slope does not depend on it.

    Raises
    ------
    ValueError
        If a value in the window is not positive or fewer than 4 points remain.
    """
    pts = np.asarray(list(points), dtype=float).reshape(-1, 2)
    if window is not None:
        lo, hi = window
        pts = pts[(pts[:, 0] >= lo) & (pts[:, 0] <= hi)]
    if pts.shape[0] < 4:
        raise ValueError(f"need at least 4 points in the fit window, got {pts.shape[0]}")
    if np.any(pts[:, 0] <= 0) or np.any(pts[:, 1] <= 0):
        raise ValueError("log-log fit needs positive lambda and values")
    x = np.log(pts[:, 0]) / np.log(base)
    y = np.log(pts[:, 1]) / np.log(base)
    A = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - (slope * x + intercept)
    ss = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(res**2) / ss if ss > 0 else 1.0
    r2 = float(min(max(r2, 0.0), 1.0))
    win = (float(pts[:, 0].min()), float(pts[:, 0].max()))
    return ExponentFit(
        float(slope), float(intercept * np.log(base)), r2, float(np.abs(res).max()), win,
        tuple(map(tuple, np.column_stack([x, y]).tolist())),
    )


def dyadic_windows(lam_min: float, lam_max: float):
    """[l0, 2 l0], [2 l0, 4 l0], ... covering [lam_min, lam_max]."""
    out = []
    lo = float(lam_min)
    while 2 * lo <= lam_max * (1 + 1e-12):
        out.append((lo, 2 * lo))
        lo *= 2
    return out


def window_stability(points, windows, min_points: int = 4):
    """Fits on each window with enough points; returns (fits, max slope shift)."""
    points = list(points)
    fits = []
    for w in windows:
        try:
            fits.append(fit_exponent(points, w))
        except ValueError:
            continue
    shifts = [abs(a.slope - b.slope) for a, b in zip(fits, fits[1:])]
    return fits, (max(shifts) if shifts else 0.0)
