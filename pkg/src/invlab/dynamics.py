"""Model tendencies, velocity reconstruction, and RK4 time integration.

Three inviscid models share one transport core:

  singular scalar      d theta/dt + u.grad(theta) = 0,   u1 = theta via -d(psi)/dx2 = theta
  Boussinesq           adds vorticity with forcing  +d(theta)/dx1,  Delta psi = omega
  modified Boussinesq  vorticity forcing            -d(theta^2)/dx2, Delta psi = omega
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field as dataclass_field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .spectral import (
    Field,
    Grid2D,
    NonFiniteFieldError,
    Spectrum,
    antideriv_x2,
    ddx1,
    ddx2,
    dealias,
    forward,
    inverse,
    poisson_solve,
)

__all__ = [
    "ModelKind",
    "State",
    "StepControl",
    "BlowupSignal",
    "BlowupDetected",
    "CFLViolationError",
    "IntegrationResult",
    "velocity",
    "tendency",
    "rk4_step",
    "symmetry_project",
    "integrate",
    "admissible_dt",
    "max_gradient",
]


class ModelKind(Enum):
    SINGULAR_SCALAR = "singular-scalar"
    BOUSSINESQ = "boussinesq"
    MODIFIED_BOUSSINESQ = "modified-boussinesq"

    @property
    def evolves_vorticity(self) -> bool:
        return self is not ModelKind.SINGULAR_SCALAR


@dataclass
class State:
    """Evolved fields at time t.

    theta holds the active scalar (called rho in the modified model);
    omega is present exactly when the model evolves vorticity.
    """

    model: ModelKind
    t: float
    theta: Field
    omega: Optional[Field] = None

    def __post_init__(self) -> None:
        if self.t < 0:
            raise ValueError(f"time must be nonnegative, got {self.t}")
        if self.model.evolves_vorticity:
            if self.omega is None:
                raise ValueError(f"model {self.model.value} requires a vorticity field")
            if self.omega.grid != self.theta.grid:
                raise ValueError("theta and omega must share one grid")
        elif self.omega is not None:
            raise ValueError("the scalar model does not carry a vorticity field")

    @property
    def grid(self) -> Grid2D:
        return self.theta.grid

    def copy(self) -> "State":
        return State(
            self.model,
            self.t,
            self.theta.copy(),
            self.omega.copy() if self.omega is not None else None,
        )


@dataclass
class StepControl:
    """Time-stepping parameters.

    dt is the maximum step (None lets the CFL bound pick it); cfl is the
    safety factor for dt <= cfl * min(dx, dy) / max|u|.
    """

    dt: Optional[float] = None
    cfl: float = 0.4
    dealias: bool = True
    project_symmetry: bool = False
    hyperviscosity: float = 0.0
    max_grad: float = 1e6

    def __post_init__(self) -> None:
        if self.dt is not None and self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not 0 < self.cfl <= 1:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.hyperviscosity < 0:
            raise ValueError("hyperviscosity coefficient must be nonnegative")
        if self.max_grad <= 0:
            raise ValueError("gradient ceiling must be positive")


@dataclass
class BlowupSignal:
    """Raised evidence that the run left the smooth regime."""

    t: float
    max_grad: float
    reason: str  # "non-finite" or "gradient-ceiling"
    trace: list = dataclass_field(default_factory=list)  # recent (t, max|grad theta|)


class BlowupDetected(RuntimeError):
    def __init__(self, t: float, max_grad: float, reason: str, last_state: State):
        super().__init__(f"blowup detected at t = {t:.6g} ({reason}), max|grad theta| = {max_grad:.3e}")
        self.t = t
        self.max_grad = max_grad
        self.reason = reason
        self.last_state = last_state


class CFLViolationError(ValueError):
    def __init__(self, dt: float, admissible: float):
        super().__init__(
            f"dt = {dt:.6g} violates the CFL bound; admissible dt <= {admissible:.6g}"
        )
        self.admissible = admissible


@dataclass
class IntegrationResult:
    state: State
    blowup: Optional[BlowupSignal]
    steps: int


def _velocity_hat(model: ModelKind, theta_hat: Spectrum, omega_hat: Optional[Spectrum]):
    """Stream-function inversion in coefficient space; returns (u1_hat, u2_hat)."""
    grid = theta_hat.grid
    if model is ModelKind.SINGULAR_SCALAR:
        # The x2-mean modes m(x1) of theta have no periodic primitive in x2.
        # Carry them with the divergence-free closure
        #   u1 += m(x1) cos(q x2),  u2 -= m'(x1) sin(q x2)/q,  q = 2 pi / ly,
        # which is exact on the x2 = 0 axis (u1 = theta, u2 unchanged) and
        # reduces to the plain inversion when the mean modes vanish.
        mean = theta_hat.coeffs[:, 0].copy()
        core = theta_hat.copy()
        core.coeffs[:, 0] = 0.0
        psi = antideriv_x2(core)
        u1 = ddx2(psi)
        u1.coeffs *= -1.0
        u2 = ddx1(psi)
        q = 2.0 * math.pi / grid.ly
        u1.coeffs[0, 0] += mean[0]
        m = mean.copy()
        m[0] = 0.0
        u1.coeffs[:, 1] += 0.5 * m
        u1.coeffs[:, -1] += 0.5 * m
        dm = 1j * grid.kx_deriv * m
        u2.coeffs[:, 1] += (1j / (2.0 * q)) * dm
        u2.coeffs[:, -1] += (-1j / (2.0 * q)) * dm
        return u1, u2
    psi = poisson_solve(omega_hat)
    u1 = ddx2(psi)
    u1.coeffs *= -1.0
    u2 = ddx1(psi)
    return u1, u2


def velocity(state: State) -> tuple[Field, Field]:
    """Reconstruct the divergence-free velocity (u1, u2) for the state."""
    theta_hat = forward(state.theta)
    omega_hat = forward(state.omega) if state.omega is not None else None
    u1, u2 = _velocity_hat(state.model, theta_hat, omega_hat)
    return inverse(u1), inverse(u2)


def tendency(state: State, ctrl: StepControl = StepControl()) -> tuple[Field, Optional[Field]]:
    """Right-hand side fields (dtheta/dt, domega/dt or None)."""
    grid = state.grid
    theta_hat = forward(state.theta)
    omega_hat = forward(state.omega) if state.omega is not None else None
    u1_hat, u2_hat = _velocity_hat(state.model, theta_hat, omega_hat)
    u1 = inverse(u1_hat).values
    u2 = inverse(u2_hat).values

    def advect(f_hat: Spectrum) -> Spectrum:
        gx = inverse(ddx1(f_hat)).values
        gy = inverse(ddx2(f_hat)).values
        with np.errstate(over="ignore", invalid="ignore"):
            # overflow here is a detected blowup, reported by forward()
            product = u1 * gx + u2 * gy
        adv = forward(Field(grid, product))
        return dealias(adv) if ctrl.dealias else adv

    nu = ctrl.hyperviscosity
    dtheta_hat = -advect(theta_hat).coeffs
    if nu > 0:
        dtheta_hat -= nu * (grid.k_squared**2) * theta_hat.coeffs

    if state.model is ModelKind.SINGULAR_SCALAR:
        return inverse(Spectrum(grid, dtheta_hat)), None

    domega_hat = -advect(omega_hat).coeffs
    if state.model is ModelKind.BOUSSINESQ:
        domega_hat += ddx1(theta_hat).coeffs
    else:
        with np.errstate(over="ignore", invalid="ignore"):
            squared = state.theta.values**2
        sq = forward(Field(grid, squared))
        if ctrl.dealias:
            sq = dealias(sq)
        domega_hat -= ddx2(sq).coeffs
    if nu > 0:
        domega_hat -= nu * (grid.k_squared**2) * omega_hat.coeffs
    return inverse(Spectrum(grid, dtheta_hat)), inverse(Spectrum(grid, domega_hat))


def max_speed(state: State) -> float:
    u1, u2 = velocity(state)
    return float(np.max(np.hypot(u1.values, u2.values)))


def max_gradient(f: Field) -> float:
    """max over nodes of |grad f| via spectral derivatives."""
    f_hat = forward(f)
    gx = inverse(ddx1(f_hat)).values
    gy = inverse(ddx2(f_hat)).values
    return float(np.max(np.hypot(gx, gy)))


def admissible_dt(state: State, ctrl: StepControl) -> float:
    """CFL-admissible step for the state; inf when the flow is at rest."""
    umax = max_speed(state)
    if umax == 0.0:
        return math.inf
    return ctrl.cfl * min(state.grid.dx, state.grid.dy) / umax


def _pack(state: State) -> list[np.ndarray]:
    arrays = [state.theta.values]
    if state.omega is not None:
        arrays.append(state.omega.values)
    return arrays


def _make_state(model: ModelKind, grid: Grid2D, t: float, arrays: Sequence[np.ndarray]) -> State:
    omega = Field(grid, arrays[1]) if len(arrays) > 1 else None
    return State(model, t, Field(grid, arrays[0]), omega)


def rk4_step(state: State, ctrl: StepControl, dt: Optional[float] = None) -> State:
    """One classical four-stage Runge-Kutta step of size dt (default ctrl.dt).

    Validates the CFL bound at the step start; raises BlowupDetected if the
    step produces non-finite fields.
    """
    if dt is None:
        dt = ctrl.dt
    if dt is None or dt <= 0:
        raise ValueError("rk4_step needs a positive dt (given or via ctrl.dt)")
    adm = admissible_dt(state, ctrl)
    if dt > adm * (1.0 + 1e-9):
        raise CFLViolationError(dt, adm)

    grid = state.grid
    y0 = _pack(state)

    def blowup(t: float) -> BlowupDetected:
        return BlowupDetected(t, max_gradient(state.theta), "non-finite", state)

    def rhs(t: float, arrays: Sequence[np.ndarray]) -> list[np.ndarray]:
        for arr in arrays:
            if not np.all(np.isfinite(arr)):
                raise blowup(t)
        stage = _make_state(state.model, grid, t, arrays)
        try:
            dtheta, domega = tendency(stage, ctrl)
        except NonFiniteFieldError:
            # a finite stage can still overflow inside the nonlinear products
            raise blowup(t) from None
        out = [dtheta.values]
        if domega is not None:
            out.append(domega.values)
        return out

    t0 = state.t
    k1 = rhs(t0, y0)
    k2 = rhs(t0 + dt / 2, [y + dt / 2 * k for y, k in zip(y0, k1)])
    k3 = rhs(t0 + dt / 2, [y + dt / 2 * k for y, k in zip(y0, k2)])
    k4 = rhs(t0 + dt, [y + dt * k for y, k in zip(y0, k3)])

    new = [
        y + dt / 6 * (a + 2 * b + 2 * c + d)
        for y, a, b, c, d in zip(y0, k1, k2, k3, k4)
    ]
    for arr in new:
        if not np.all(np.isfinite(arr)):
            raise blowup(t0 + dt)
    return _make_state(state.model, grid, t0 + dt, new)


def _reflect_x2(values: np.ndarray) -> np.ndarray:
    # node k maps to node (-k) mod ny
    return np.roll(values[:, ::-1], 1, axis=1)


def symmetry_project(state: State) -> State:
    """Project onto the model's parity class about x2 = 0 (idempotent).

    The scalar model keeps the even part of theta; the vorticity models
    keep the odd parts of both theta (rho) and omega.
    """
    if state.model is ModelKind.SINGULAR_SCALAR:
        theta = 0.5 * (state.theta.values + _reflect_x2(state.theta.values))
        return State(state.model, state.t, Field(state.grid, theta))
    theta = 0.5 * (state.theta.values - _reflect_x2(state.theta.values))
    omega = 0.5 * (state.omega.values - _reflect_x2(state.omega.values))
    return State(state.model, state.t, Field(state.grid, theta), Field(state.grid, omega))


def integrate(
    state: State,
    ctrl: StepControl,
    t_end: float,
    observers: Sequence[Callable[[State], None]] = (),
) -> IntegrationResult:
    """Advance to t_end with per-step CFL re-evaluation.

    Observers are called after every accepted step.  On blowup the result
    carries the last finite state together with the signal.
    """
    if t_end < state.t:
        raise ValueError(f"t_end = {t_end} lies before the state time {state.t}")
    trace: deque = deque(maxlen=32)
    current = state
    steps = 0
    eps = 1e-12 * max(1.0, abs(t_end))
    while current.t < t_end - eps:
        adm = admissible_dt(current, ctrl)
        dt = min(d for d in (ctrl.dt, adm, t_end - current.t) if d is not None)
        try:
            new = rk4_step(current, ctrl, dt=dt)
        except BlowupDetected as exc:
            signal = BlowupSignal(exc.t, exc.max_grad, exc.reason, list(trace))
            return IntegrationResult(current, signal, steps)
        if ctrl.project_symmetry:
            new = symmetry_project(new)
        grad = max_gradient(new.theta)
        if not math.isfinite(grad):
            signal = BlowupSignal(new.t, grad, "non-finite", list(trace))
            return IntegrationResult(current, signal, steps)
        trace.append((new.t, grad))
        current = new
        steps += 1
        for obs in observers:
            obs(current)
        if grad > ctrl.max_grad:
            signal = BlowupSignal(current.t, grad, "gradient-ceiling", list(trace))
            return IntegrationResult(current, signal, steps)
    return IntegrationResult(current, None, steps)
