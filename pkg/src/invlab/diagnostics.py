"""Measurement layer: norms, residuals, symmetry errors, growth and blowup fits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .dynamics import ModelKind, State, velocity
from .spectral import Field, ddx1, ddx2, forward, inverse

__all__ = [
    "TimeSeries",
    "GrowthFit",
    "BlowupEstimate",
    "ConservationRow",
    "sup_grad",
    "min_axis_slope",
    "fit_growth_rate",
    "extrapolate_blowup",
    "residual",
    "residual_from_states",
    "symmetry_error",
    "conservation_report",
    "l2_norm",
    "format_conservation_csv",
]


@dataclass
class TimeSeries:
    """Samples (t, v) with strictly increasing t and finite values."""

    t: np.ndarray
    v: np.ndarray

    def __post_init__(self) -> None:
        self.t = np.asarray(self.t, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        if self.t.shape != self.v.shape or self.t.ndim != 1:
            raise ValueError("t and v must be matching one-dimensional arrays")
        if len(self.t) and np.any(np.diff(self.t) <= 0):
            raise ValueError("sample times must be strictly increasing")
        if not np.all(np.isfinite(self.t)) or not np.all(np.isfinite(self.v)):
            raise ValueError("time series samples must be finite")

    def window(self, t_lo: float, t_hi: float) -> "TimeSeries":
        mask = (self.t >= t_lo) & (self.t <= t_hi)
        return TimeSeries(self.t[mask], self.v[mask])


@dataclass
class GrowthFit:
    rate: float
    intercept: float
    r2: float
    window: tuple[float, float]


@dataclass
class BlowupEstimate:
    t_est: float  # may be +inf
    r2: float
    window: tuple[float, float]
    warning: Optional[str] = None


def _linefit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least-squares line y ~ a + b*x; returns (b, a, r2)."""
    coeffs = np.polyfit(x, y, 1)
    b, a = float(coeffs[0]), float(coeffs[1])
    pred = a + b * x
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return b, a, min(max(r2, 0.0), 1.0)


def fit_growth_rate(series: TimeSeries, window: Optional[tuple[float, float]] = None) -> GrowthFit:
    """Exponential rate from a least-squares line through (t, log v).

    The default window is the last half of the series (early transients
    pollute the rate).  Nonpositive values inside the window are rejected.
    """
    if window is None:
        mid = 0.5 * (series.t[0] + series.t[-1])
        window = (float(mid), float(series.t[-1]))
    sub = series.window(*window)
    if len(sub.t) < 5:
        raise ValueError(f"need at least 5 samples in the window, got {len(sub.t)}")
    if np.any(sub.v <= 0):
        raise ValueError("window contains nonpositive values; log growth undefined")
    rate, intercept, r2 = _linefit(sub.t, np.log(sub.v))
    return GrowthFit(rate, intercept, r2, window)


def extrapolate_blowup(series: TimeSeries, window: Optional[tuple[float, float]] = None) -> BlowupEstimate:
    """Blowup time from a least-squares line through (t, 1/v).

    The reciprocal of the axis min-slope magnitude is affine in t, so its
    root estimates the singularity time; a nonnegative fitted slope means
    no blowup (+inf).  A non-monotone window attaches a low-confidence
    warning instead of failing.
    """
    if window is None:
        window = (float(series.t[0]), float(series.t[-1]))
    sub = series.window(*window)
    if len(sub.t) < 2:
        raise ValueError(f"need at least 2 samples in the window, got {len(sub.t)}")
    if np.any(sub.v == 0):
        raise ValueError("window contains zero values; reciprocal undefined")
    warning = None
    if np.any(np.diff(sub.v) <= 0):
        warning = "series is not increasing over the window; low-confidence estimate"
    slope, intercept, r2 = _linefit(sub.t, 1.0 / sub.v)
    if slope >= 0:
        return BlowupEstimate(math.inf, r2, window, warning)
    return BlowupEstimate(-intercept / slope, r2, window, warning)


def sup_grad(f: Field) -> tuple[float, tuple[float, float]]:
    """Max over nodes of |grad f| (spectral derivatives) and its location."""
    f_hat = forward(f)
    gx = inverse(ddx1(f_hat)).values
    gy = inverse(ddx2(f_hat)).values
    mag = np.hypot(gx, gy)
    j, k = np.unravel_index(int(np.argmax(mag)), mag.shape)
    grid = f.grid
    return float(mag[j, k]), (float(grid.x1[j]), float(grid.x2[k]))


def min_axis_slope(f: Field) -> float:
    """Min over the x2 = 0 row of the spectral d/dx1 of f."""
    row = f.values[:, 0]
    slope = np.fft.ifft(np.fft.fft(row) * 1j * f.grid.kx_deriv).real
    return float(np.min(slope))


def _require(value, name: str):
    if value is None:
        raise ValueError(f"residual evaluation needs the partial '{name}' but the bundle lacks it")
    return value


def _transport_terms(sample, scalar: str) -> float:
    dt = _require(getattr(sample, f"d{scalar}_dt"), f"d{scalar}_dt")
    dx1 = _require(getattr(sample, f"d{scalar}_dx1"), f"d{scalar}_dx1")
    dx2 = _require(getattr(sample, f"d{scalar}_dx2"), f"d{scalar}_dx2")
    u2 = _require(sample.u2, "u2")
    total = dt + u2 * dx2
    if dx1 != 0.0:
        total += _require(sample.u1, "u1") * dx1
    return total


def residual(sampler, model: ModelKind, points: Sequence[tuple[float, float, float]]):
    """Max absolute equation residuals over (x1, x2, t) points.

    The sampler provides field values and first partials at a point
    (an oracle family, or any object with a compatible .sample method).
    Returns (max theta residual, max omega residual or None).
    """
    sample_fn = getattr(sampler, "sample", sampler)
    max_theta = 0.0
    max_omega: Optional[float] = 0.0 if model.evolves_vorticity else None
    for x1, x2, t in points:
        s = sample_fn(float(x1), float(x2), float(t))
        max_theta = max(max_theta, abs(_transport_terms(s, "theta")))
        if model is ModelKind.SINGULAR_SCALAR:
            continue
        lhs = _transport_terms(s, "omega")
        if model is ModelKind.BOUSSINESQ:
            rhs = _require(s.dtheta_dx1, "dtheta_dx1")
        else:
            theta = _require(s.theta, "theta")
            rhs = -2.0 * theta * _require(s.dtheta_dx2, "dtheta_dx2")
        max_omega = max(max_omega, abs(lhs - rhs))
    return max_theta, max_omega


def _central_dt(prev: np.ndarray, mid: np.ndarray, nxt: np.ndarray, h1: float, h2: float) -> np.ndarray:
    # second-order central difference, robust to mildly nonuniform spacing
    return (h1 * h1 * nxt - h2 * h2 * prev + (h2 * h2 - h1 * h1) * mid) / (h1 * h2 * (h1 + h2))


def residual_from_states(prev: State, mid: State, nxt: State):
    """PDE residual of a numerical run measured on a snapshot triple.

    Space derivatives are spectral on the middle snapshot; the time
    derivative is a second-order central difference across the triple.
    Returns the same (theta, omega) pair as residual(), maximized over
    grid nodes.
    """
    if not (prev.model is mid.model is nxt.model):
        raise ValueError("snapshots come from different models")
    if not (prev.t < mid.t < nxt.t):
        raise ValueError("snapshots must be time-ordered")
    h1, h2 = mid.t - prev.t, nxt.t - mid.t
    grid = mid.grid
    u1, u2 = velocity(mid)

    def grad(fld: Field) -> tuple[np.ndarray, np.ndarray]:
        f_hat = forward(fld)
        return inverse(ddx1(f_hat)).values, inverse(ddx2(f_hat)).values

    tx1, tx2 = grad(mid.theta)
    dtheta_dt = _central_dt(prev.theta.values, mid.theta.values, nxt.theta.values, h1, h2)
    res_theta = dtheta_dt + u1.values * tx1 + u2.values * tx2
    max_theta = float(np.max(np.abs(res_theta)))
    if mid.model is ModelKind.SINGULAR_SCALAR:
        return max_theta, None
    wx1, wx2 = grad(mid.omega)
    domega_dt = _central_dt(prev.omega.values, mid.omega.values, nxt.omega.values, h1, h2)
    lhs = domega_dt + u1.values * wx1 + u2.values * wx2
    if mid.model is ModelKind.BOUSSINESQ:
        rhs = tx1
    else:
        sq_hat = forward(Field(grid, mid.theta.values**2))
        rhs = -inverse(ddx2(sq_hat)).values
    return max_theta, float(np.max(np.abs(lhs - rhs)))


def symmetry_error(f: Field, parity: str) -> float:
    """Max |f(x1, x2) -+ f(x1, -x2)| over nodes for parity 'even' or 'odd'."""
    reflected = np.roll(f.values[:, ::-1], 1, axis=1)
    if parity == "even":
        return float(np.max(np.abs(f.values - reflected)))
    if parity == "odd":
        return float(np.max(np.abs(f.values + reflected)))
    raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")


def l2_norm(f: Field) -> float:
    grid = f.grid
    return float(np.sqrt(np.sum(f.values**2) * grid.dx * grid.dy))


@dataclass
class ConservationRow:
    t: float
    l2_theta: float
    linf_theta: float
    mean_theta: float
    l2_omega: Optional[float]
    drift_l2_theta: float
    drift_linf_theta: float


def _rel_drift(value: float, ref: float) -> float:
    if ref == 0.0:
        return abs(value)
    return abs(value - ref) / abs(ref)


def conservation_report(states: Sequence[State]) -> list[ConservationRow]:
    """Norms per snapshot with drift columns relative to the first one."""
    if not states:
        raise ValueError("need at least one state")
    rows = []
    ref_l2 = ref_linf = None
    for s in states:
        l2 = l2_norm(s.theta)
        linf = float(np.max(np.abs(s.theta.values)))
        mean = float(np.mean(s.theta.values))
        l2w = l2_norm(s.omega) if s.omega is not None else None
        if ref_l2 is None:
            ref_l2, ref_linf = l2, linf
        rows.append(
            ConservationRow(
                t=s.t,
                l2_theta=l2,
                linf_theta=linf,
                mean_theta=mean,
                l2_omega=l2w,
                drift_l2_theta=_rel_drift(l2, ref_l2),
                drift_linf_theta=_rel_drift(linf, ref_linf),
            )
        )
    return rows


def format_conservation_csv(rows: Sequence[ConservationRow]) -> str:
    lines = ["t,l2_theta,linf_theta,mean_theta,l2_omega,drift_l2_theta,drift_linf_theta"]
    for r in rows:
        l2w = "" if r.l2_omega is None else f"{r.l2_omega:.17g}"
        lines.append(
            f"{r.t:.17g},{r.l2_theta:.17g},{r.linf_theta:.17g},"
            f"{r.mean_theta:.17g},{l2w},{r.drift_l2_theta:.17g},{r.drift_linf_theta:.17g}"
        )
    return "\n".join(lines) + "\n"
