"""Experiment orchestration: solver runs, oracle checks, convergence studies."""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .burgers import AxisProfile, BurgersSolution, evaluate_many
from .config import ConfigError, RunConfig, config_echo
from .diagnostics import l2_norm, min_axis_slope, residual, sup_grad, symmetry_error
from .dynamics import ModelKind, State, StepControl, integrate
from .oracles import growth_envelope
from .presets import SOLVER_PRESETS, build_initial_state, grid_for, oracle_solution
from .snapshots import state_fields, write_snapshot

__all__ = ["RunArtifacts", "run", "OracleCheckReport", "oracle_check", "convergence", "ConvergenceRow"]

SERIES_HEADER = "t,l2_theta,linf_theta,sup_grad_theta,min_axis_slope"
RESIDUAL_THRESHOLD = 1e-10


@dataclass
class RunArtifacts:
    outdir: Path
    blowup: Optional[object]
    series_path: Path
    meta_path: Path
    snapshot_paths: list[Path]
    steps: int


def _series_row(state: State) -> str:
    l2 = l2_norm(state.theta)
    linf = float(np.max(np.abs(state.theta.values)))
    grad, _ = sup_grad(state.theta)
    if state.model is ModelKind.SINGULAR_SCALAR:
        slope = min_axis_slope(state.theta)
    else:
        slope = math.nan
    return f"{state.t:.17g},{l2:.17g},{linf:.17g},{grad:.17g},{slope:.17g}"


def run(cfg: RunConfig, output_dir: Optional[Path] = None) -> RunArtifacts:
    """Execute one configured run, writing series.csv, snapshots, and meta.txt.

    Partial artifacts survive a blowup signal; the signal is recorded in
    meta.txt and reported in the returned artifacts.
    """
    start = time.perf_counter()
    outdir = Path(output_dir) if output_dir is not None else Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    grid = grid_for(cfg)
    state = build_initial_state(cfg, grid)
    ctrl = StepControl(
        dt=cfg.dt,
        cfl=cfg.cfl,
        dealias=cfg.dealias,
        project_symmetry=cfg.project_symmetry,
        hyperviscosity=cfg.hyperviscosity,
        max_grad=cfg.max_grad,
    )

    series_path = outdir / "series.csv"
    snapshot_paths: list[Path] = []
    conservation_rows: list[str] = []
    symmetry_rows: list[str] = []
    want_conservation = "conservation" in cfg.diagnostics
    want_symmetry = "symmetry" in cfg.diagnostics

    def snapshot(state: State) -> None:
        path = outdir / f"snapshot-{len(snapshot_paths):04d}.bin"
        write_snapshot(path, state.t, state_fields(state))
        snapshot_paths.append(path)

    def extra_diagnostics(state: State) -> None:
        if want_conservation:
            mean = float(np.mean(state.theta.values))
            l2w = "" if state.omega is None else f"{l2_norm(state.omega):.17g}"
            conservation_rows.append(
                f"{state.t:.17g},{l2_norm(state.theta):.17g},"
                f"{float(np.max(np.abs(state.theta.values))):.17g},{mean:.17g},{l2w}"
            )
        if want_symmetry:
            parity = "even" if state.model is ModelKind.SINGULAR_SCALAR else "odd"
            err_theta = symmetry_error(state.theta, parity)
            err_omega = "" if state.omega is None else f"{symmetry_error(state.omega, 'odd'):.17g}"
            symmetry_rows.append(f"{state.t:.17g},{err_theta:.17g},{err_omega}")

    with open(series_path, "w") as series:
        series.write(SERIES_HEADER + "\n")
        series.write(_series_row(state) + "\n")
        series.flush()
        extra_diagnostics(state)
        snapshot(state)
        last_series_t = state.t
        last_snapshot_t = state.t
        next_series = state.t + cfg.series_interval
        next_snapshot = state.t + cfg.snapshot_interval

        def observer(s: State) -> None:
            nonlocal next_series, next_snapshot, last_series_t, last_snapshot_t
            if cfg.series_interval > 0 and s.t >= next_series - 1e-9:
                series.write(_series_row(s) + "\n")
                series.flush()
                extra_diagnostics(s)
                last_series_t = s.t
                while next_series <= s.t + 1e-9:
                    next_series += cfg.series_interval
            if cfg.snapshot_interval > 0 and s.t >= next_snapshot - 1e-9:
                snapshot(s)
                last_snapshot_t = s.t
                while next_snapshot <= s.t + 1e-9:
                    next_snapshot += cfg.snapshot_interval

        result = integrate(state, ctrl, cfg.t_end, observers=[observer])
        final = result.state
        if final.t > last_series_t + 1e-12:
            series.write(_series_row(final) + "\n")
            extra_diagnostics(final)
        if final.t > last_snapshot_t + 1e-12:
            snapshot(final)

    if want_conservation:
        (outdir / "conservation.csv").write_text(
            "t,l2_theta,linf_theta,mean_theta,l2_omega\n" + "\n".join(conservation_rows) + "\n"
        )
    if want_symmetry:
        (outdir / "symmetry.csv").write_text(
            "t,symmetry_error_theta,symmetry_error_omega\n" + "\n".join(symmetry_rows) + "\n"
        )

    wall = time.perf_counter() - start
    meta_path = outdir / "meta.txt"
    lines = [config_echo(cfg).rstrip("\n")]
    lines.append(f"steps = {result.steps}")
    lines.append(f"t_final = {final.t:.17g}")
    lines.append(f"wall_clock_seconds = {wall:.3f}")
    if result.blowup is not None:
        b = result.blowup
        lines.append("blowup = signalled")
        lines.append(f"blowup.t = {b.t:.17g}")
        lines.append(f"blowup.max_grad = {b.max_grad:.17g}")
        lines.append(f"blowup.reason = {b.reason}")
    else:
        lines.append("blowup = none")
    meta_path.write_text("\n".join(lines) + "\n")
    return RunArtifacts(outdir, result.blowup, series_path, meta_path, snapshot_paths, result.steps)


@dataclass
class OracleCheckReport:
    family: str
    preset: str
    max_theta_residual: float
    max_omega_residual: Optional[float]
    passed: bool
    npoints: int
    envelope_path: Optional[Path]


def oracle_check(
    family: str,
    preset: Optional[str] = None,
    npoints: int = 500,
    seed: int = 0,
    output_dir: Optional[Path] = None,
) -> OracleCheckReport:
    """Residual check of a closed-form family at random off-axis points.

    Fails (passed = False) when any equation residual exceeds 1e-10.
    Also writes a growth-envelope CSV when an output directory is given.
    """
    solution, model, interval = oracle_solution(family, preset)
    rng = np.random.default_rng(seed)
    x1 = rng.uniform(-2.0, 2.0, npoints)
    x2 = rng.uniform(0.05, 2.0, npoints) * rng.choice([-1.0, 1.0], npoints)
    t = rng.uniform(0.0, 2.0, npoints)
    max_theta, max_omega = residual(solution, model, list(zip(x1, x2, t)))
    passed = max_theta <= RESIDUAL_THRESHOLD and (max_omega is None or max_omega <= RESIDUAL_THRESHOLD)

    envelope_path = None
    if output_dir is not None:
        outdir = Path(output_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        times = np.linspace(0.0, 6.0, 61)
        theta_env = growth_envelope(solution, interval, times, field="theta")
        columns = [("sup_dtheta_dx2", theta_env)]
        if getattr(solution, "domega_dx2", None) is not None and model.evolves_vorticity:
            columns.append(("sup_domega_dx2", growth_envelope(solution, interval, times, field="omega")))
        name = preset or "default"
        envelope_path = outdir / f"{family}-{name}-envelope.csv"
        header = "t," + ",".join(label for label, _ in columns)
        rows = []
        for i, tv in enumerate(times):
            rows.append(
                f"{tv:.17g}," + ",".join(f"{series.v[i]:.17g}" for _, series in columns)
            )
        envelope_path.write_text(header + "\n" + "\n".join(rows) + "\n")

    return OracleCheckReport(
        family, preset or "default", max_theta, max_omega, passed, npoints, envelope_path
    )


@dataclass
class ConvergenceRow:
    level: int
    nx: int
    dt: float
    error: float
    order: Optional[float]


_COS_PROFILE = AxisProfile(np.cos, lambda x: -np.sin(x))


def _axis_error(cfg: RunConfig, nx: int, dt: float, sol: BurgersSolution) -> float:
    level_cfg = RunConfig(
        model=cfg.model,
        ic=cfg.ic,
        t_end=cfg.t_end,
        nx=nx,
        ny=nx,
        dt=dt,
        cfl=cfg.cfl,
        dealias=cfg.dealias,
    )
    grid = grid_for(level_cfg)
    state = build_initial_state(level_cfg, grid)
    ctrl = StepControl(dt=dt, cfl=cfg.cfl, dealias=cfg.dealias)
    result = integrate(state, ctrl, cfg.t_end)
    axis = result.state.theta.values[:, 0]
    oracle = evaluate_many(sol, grid.x1, cfg.t_end)
    return float(np.max(np.abs(axis - oracle)))


def convergence(cfg: RunConfig, levels: int, mode: str = "temporal", workers: Optional[int] = None) -> list[ConvergenceRow]:
    """Refinement study against the exact axis solution.

    temporal: halve dt per level on a fixed grid (RK4 order ~ 4).
    spatial: double nx per level at fixed small dt (spectral plateau).
    Requires the singular-cos data, whose axis trace is exactly cos.
    """
    if levels < 3:
        raise ConfigError(f"need at least 3 refinement levels, got {levels}")
    if mode not in ("temporal", "spatial"):
        raise ConfigError(f"mode must be 'temporal' or 'spatial', got {mode!r}")
    if cfg.model is not ModelKind.SINGULAR_SCALAR or cfg.ic != "singular-cos":
        raise ConfigError("convergence requires the singular-cos configuration (exact axis oracle)")
    sol = BurgersSolution(_COS_PROFILE)
    if cfg.t_end >= sol.tstar:
        raise ConfigError(f"t_end must precede the axis blowup time {sol.tstar}")

    if mode == "temporal":
        dt0 = cfg.dt if cfg.dt is not None else 8e-3
        jobs = [(cfg.nx, dt0 / 2**i) for i in range(levels)]
    else:
        dt = cfg.dt if cfg.dt is not None else 5e-4
        jobs = [(cfg.nx * 2**i, dt) for i in range(levels)]

    if workers is None:
        workers = int(os.environ.get("INVLAB_THREADS", "1"))
    workers = max(1, min(workers, len(jobs)))
    if workers == 1:
        errors = [_axis_error(cfg, nx, dt, sol) for nx, dt in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            errors = list(pool.map(lambda job: _axis_error(cfg, job[0], job[1], sol), jobs))

    rows = []
    for i, ((nx, dt), err) in enumerate(zip(jobs, errors)):
        order = None
        if i > 0 and err > 0 and errors[i - 1] > 0:
            order = math.log2(errors[i - 1] / err)
        rows.append(ConvergenceRow(i, nx, dt, err, order))
    return rows


def resolve_run_config_text(name_or_path: str) -> str:
    """Config text for `run`: a preset name or a file path."""
    if name_or_path in SOLVER_PRESETS:
        return SOLVER_PRESETS[name_or_path]
    path = Path(name_or_path)
    if not path.exists():
        known = ", ".join(sorted(SOLVER_PRESETS))
        raise ConfigError(f"{name_or_path!r} is neither a config file nor a preset (presets: {known})")
    return path.read_text()
