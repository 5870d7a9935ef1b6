"""Named initial conditions, solver configs, and oracle families.

Every documented experiment is pinned to a reproducible name here:

  singular-cos      solver run, theta0 = cos(x1) cos(x2)
  wedge-sin         oracle, theta0 = sin
  moving-identity   oracle, omega0 = theta0 = identity
  modified-linear   oracle, rho0 = identity, omega0 = sign
  modified-oscillatory          oracle, rho0 = sin, omega0 = sign (self-consistent)
  modified-paper-printed        oracle, published inconsistent pairing (checker fails)
  stationary-const  oracle, constant scalar
"""

from __future__ import annotations

import math

import numpy as np

from .config import ConfigError, RunConfig
from .dynamics import ModelKind, State
from .oracles import (
    ModifiedSolution,
    MovingDomainSolution,
    PrintedOscillatorySolution,
    UniformScalarSolution,
    WedgeSolution,
    PROFILES,
)
from .spectral import Field, Grid2D

__all__ = [
    "IC_PRESETS",
    "SOLVER_PRESETS",
    "ORACLE_FAMILIES",
    "REGISTRY",
    "build_initial_state",
    "oracle_solution",
    "grid_for",
]

_EXPR_PREFIX = "expr:"

_NAMESPACE = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "sign": np.sign,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
    "pi": math.pi,
}


def _eval_expr(expr: str, grid: Grid2D) -> np.ndarray:
    x1, x2 = grid.mesh()
    ns = dict(_NAMESPACE, x1=x1, x2=x2)
    try:
        values = eval(expr, {"__builtins__": {}}, ns)  # noqa: S307 - whitelisted namespace
    except Exception as exc:
        raise ConfigError(f"cannot evaluate expression {expr!r}: {exc}") from None
    return np.broadcast_to(np.asarray(values, dtype=np.float64), grid.shape).copy()


# ic presets usable in configs: name -> (restricted model, theta expr, omega expr or None)
IC_PRESETS = {
    "singular-cos": (ModelKind.SINGULAR_SCALAR, "cos(x1)*cos(x2)", None),
}

# full config documents for `run <preset>`
SOLVER_PRESETS = {
    "singular-cos": (
        "model = singular-scalar\n"
        "ic = singular-cos\n"
        "t_end = 0.5\n"
        "dt = 0.001\n"
    ),
}


def build_initial_state(cfg: RunConfig, grid: Grid2D) -> State:
    """Fields at t = 0 from the config's ic / ic_omega entries."""
    theta_expr = cfg.ic
    omega_expr = cfg.ic_omega or None
    if not cfg.ic.startswith(_EXPR_PREFIX):
        if cfg.ic not in IC_PRESETS:
            known = ", ".join(sorted(IC_PRESETS))
            raise ConfigError(
                f"unknown ic preset {cfg.ic!r}; known presets: {known} "
                f"(use '{_EXPR_PREFIX} <expression in x1, x2>' for custom data)"
            )
        model, theta_expr, preset_omega = IC_PRESETS[cfg.ic]
        if model is not cfg.model:
            raise ConfigError(
                f"ic preset {cfg.ic!r} belongs to model {model.value}, config says {cfg.model.value}"
            )
        theta_expr = _EXPR_PREFIX + " " + theta_expr
        if omega_expr is None and preset_omega is not None:
            omega_expr = _EXPR_PREFIX + " " + preset_omega
    theta = Field(grid, _eval_expr(theta_expr[len(_EXPR_PREFIX):], grid))
    omega = None
    if cfg.model.evolves_vorticity:
        if omega_expr is None:
            raise ConfigError(f"model {cfg.model.value} needs an ic_omega expression")
        if not omega_expr.startswith(_EXPR_PREFIX):
            raise ConfigError(f"ic_omega must be an '{_EXPR_PREFIX} ...' expression")
        omega = Field(grid, _eval_expr(omega_expr[len(_EXPR_PREFIX):], grid))
    elif cfg.ic_omega:
        raise ConfigError("the scalar model takes no ic_omega")
    return State(cfg.model, 0.0, theta, omega)


def grid_for(cfg: RunConfig) -> Grid2D:
    lx = cfg.lx if cfg.lx is not None else 2.0 * math.pi
    ly = cfg.ly if cfg.ly is not None else 2.0 * math.pi
    return Grid2D(cfg.nx, cfg.ny, lx, ly)


def _wedge(preset: str):
    if preset != "sin":
        raise ConfigError(f"unknown wedge preset {preset!r}; known: sin")
    return WedgeSolution(PROFILES["sin"])


def _moving(preset: str):
    if preset != "identity":
        raise ConfigError(f"unknown moving-domain preset {preset!r}; known: identity")
    return MovingDomainSolution(PROFILES["identity"], PROFILES["identity"])


def _modified(preset: str):
    if preset == "linear":
        return ModifiedSolution(PROFILES["identity"], PROFILES["sign"])
    if preset == "oscillatory":
        return ModifiedSolution(PROFILES["sin"], PROFILES["sign"])
    if preset == "paper-printed":
        return PrintedOscillatorySolution()
    raise ConfigError(
        f"unknown modified preset {preset!r}; known: linear, oscillatory, paper-printed"
    )


def _stationary(preset: str):
    if preset != "const":
        raise ConfigError(f"unknown stationary preset {preset!r}; known: const")
    return UniformScalarSolution(1.0)


# family -> (model checked against, default preset, builder, default envelope interval)
ORACLE_FAMILIES = {
    "wedge": (ModelKind.BOUSSINESQ, "sin", _wedge, (-math.pi, math.pi)),
    "moving-domain": (ModelKind.BOUSSINESQ, "identity", _moving, (-math.pi, math.pi)),
    "modified": (ModelKind.MODIFIED_BOUSSINESQ, "linear", _modified, (0.0, 1.0)),
    "stationary": (ModelKind.SINGULAR_SCALAR, "const", _stationary, (-math.pi, math.pi)),
}

# documented registry names -> (family, preset)
REGISTRY = {
    "singular-cos": ("run", "singular-cos"),
    "wedge-sin": ("oracle", ("wedge", "sin")),
    "moving-identity": ("oracle", ("moving-domain", "identity")),
    "modified-linear": ("oracle", ("modified", "linear")),
    "modified-oscillatory": ("oracle", ("modified", "oscillatory")),
    "modified-paper-printed": ("oracle", ("modified", "paper-printed")),
    "stationary-const": ("oracle", ("stationary", "const")),
}


def oracle_solution(family: str, preset: str | None = None):
    """Instantiate a closed-form family; returns (solution, model, envelope interval)."""
    if family not in ORACLE_FAMILIES:
        known = ", ".join(sorted(ORACLE_FAMILIES))
        raise ConfigError(f"unknown oracle family {family!r}; known: {known}")
    model, default_preset, builder, interval = ORACLE_FAMILIES[family]
    return builder(preset or default_preset), model, interval
