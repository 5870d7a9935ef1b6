"""Exact solution machinery for the inviscid Burgers equation on the axis.

In the symmetric class the scalar restricted to the x2 = 0 axis obeys
d(theta)/dt + theta d(theta)/dx1 = 0, whose implicit solution
theta = g(x - t*theta) is evaluated here by characteristics, together
with the first-crossing blowup time -1/min(g').
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .diagnostics import TimeSeries

__all__ = [
    "AxisProfile",
    "BurgersSolution",
    "blowup_time",
    "evaluate",
    "evaluate_many",
    "eval_slope",
    "min_slope_series",
]

SCAN_POINTS = 4096


@dataclass(frozen=True)
class AxisProfile:
    """Closed-form periodic axis trace g with its exact derivative dg.

    g and dg must accept numpy arrays (plain ufunc expressions do).
    """

    g: Callable[[np.ndarray], np.ndarray]
    dg: Callable[[np.ndarray], np.ndarray]
    period: float = 2.0 * math.pi

    def __post_init__(self) -> None:
        if self.period <= 0:
            raise ValueError(f"period must be positive, got {self.period}")


def _sample(fn: Callable, xs: np.ndarray) -> np.ndarray:
    vals = np.asarray(fn(xs), dtype=float)
    if vals.shape != xs.shape:  # constant profiles may ignore the argument
        vals = np.broadcast_to(vals, xs.shape).copy()
    return vals


def _refine_minimum(fn: Callable[[float], float], xs: np.ndarray, values: np.ndarray) -> float:
    """Dense-scan minimum polished by bounded minimization on the bracketing cell."""
    i = int(np.argmin(values))
    lo = float(xs[max(i - 1, 0)])
    hi = float(xs[min(i + 1, len(xs) - 1)])
    if hi <= lo:
        return float(values[i])
    res = minimize_scalar(fn, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    return float(min(res.fun, values[i]))


def blowup_time(p: AxisProfile) -> float:
    """First characteristic-crossing time -1/min(dg); +inf when min(dg) >= 0.

    The minimum is located by a 4096-point scan over one period followed
    by local refinement.
    """
    xs = np.linspace(0.0, p.period, SCAN_POINTS, endpoint=False)
    vals = _sample(p.dg, xs)
    min_dg = _refine_minimum(lambda x: float(p.dg(x)), xs, vals)
    if min_dg >= 0.0:
        return math.inf
    return -1.0 / min_dg


@dataclass(frozen=True)
class BurgersSolution:
    """An axis profile together with its blowup time and value range."""

    profile: AxisProfile
    tstar: float = field(init=False)
    _gmin: float = field(init=False, repr=False)
    _gmax: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "tstar", blowup_time(self.profile))
        xs = np.linspace(0.0, self.profile.period, SCAN_POINTS, endpoint=False)
        vals = _sample(self.profile.g, xs)
        gmin = _refine_minimum(lambda x: float(self.profile.g(x)), xs, vals)
        gmax = -_refine_minimum(lambda x: -float(self.profile.g(x)), xs, -vals)
        object.__setattr__(self, "_gmin", gmin)
        object.__setattr__(self, "_gmax", gmax)


def _check_time(sol: BurgersSolution, t: float) -> None:
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    if t >= sol.tstar:
        raise ValueError(
            f"t = {t:.6g} is at or past the blowup time {sol.tstar:.6g}; "
            "the solution is singular there"
        )


def _evaluate_array(sol: BurgersSolution, xs: np.ndarray, t: float) -> np.ndarray:
    """Root of theta - g(x - t*theta) per point: bisection then Newton polish.

    The implicit function is strictly increasing in theta for t < tstar,
    so the bracket [min g, max g] always contains exactly one root.
    """
    g = sol.profile.g
    dg = sol.profile.dg
    if t == 0.0:
        return _sample(g, xs)
    pad = 1e-9 * max(1.0, abs(sol._gmax), abs(sol._gmin))
    lo = np.full_like(xs, sol._gmin - pad)
    hi = np.full_like(xs, sol._gmax + pad)

    def implicit(theta: np.ndarray) -> np.ndarray:
        return theta - _sample(g, xs - t * theta)

    flo = implicit(lo)
    fhi = implicit(hi)
    if np.any(flo > 0) or np.any(fhi < 0):
        raise RuntimeError(
            "root bracket failure in the characteristic solve; "
            "profile bounds inconsistent with tstar"
        )
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = implicit(mid) <= 0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    theta = 0.5 * (lo + hi)
    for _ in range(50):
        resid = implicit(theta)
        if np.max(np.abs(resid)) <= 1e-13:
            break
        slope = 1.0 + t * _sample(dg, xs - t * theta)
        slope = np.where(slope == 0.0, 1.0, slope)
        theta = theta - resid / slope
    return theta


def evaluate(sol: BurgersSolution, x: float, t: float) -> float:
    """Value theta(x, t) on the axis, exact by characteristics."""
    _check_time(sol, t)
    return float(_evaluate_array(sol, np.asarray([x], dtype=float), t)[0])


def evaluate_many(sol: BurgersSolution, xs, t: float) -> np.ndarray:
    """Vectorized evaluate over an array of axis positions."""
    _check_time(sol, t)
    return _evaluate_array(sol, np.asarray(xs, dtype=float), t)


def _slope_array(sol: BurgersSolution, xs: np.ndarray, t: float) -> np.ndarray:
    theta = _evaluate_array(sol, xs, t)
    s0 = _sample(sol.profile.dg, xs - t * theta)
    return s0 / (1.0 + t * s0)


def eval_slope(sol: BurgersSolution, x: float, t: float) -> float:
    """Slope d(theta)/dx at (x, t): dg(xi) / (1 + t*dg(xi)) along the characteristic."""
    _check_time(sol, t)
    return float(_slope_array(sol, np.asarray([x], dtype=float), t)[0])


def min_slope_series(sol: BurgersSolution, times) -> TimeSeries:
    """Minimum over x of the slope at each time (dense scan plus refinement)."""
    times = np.asarray(times, dtype=float)
    xs = np.linspace(0.0, sol.profile.period, SCAN_POINTS, endpoint=False)
    values = []
    for t in times:
        t = float(t)
        _check_time(sol, t)
        slopes = _slope_array(sol, xs, t)
        values.append(_refine_minimum(lambda x: eval_slope(sol, float(x), t), xs, slopes))
    return TimeSeries(times, np.asarray(values))
