import dataclasses
import math

import numpy as np
import pytest

from invlab.diagnostics import (
    TimeSeries,
    conservation_report,
    extrapolate_blowup,
    fit_growth_rate,
    format_conservation_csv,
    l2_norm,
    min_axis_slope,
    residual,
    residual_from_states,
    sup_grad,
    symmetry_error,
)
from invlab.dynamics import ModelKind, State, StepControl, integrate, rk4_step
from invlab.oracles import ModifiedSolution, MovingDomainSolution, UniformScalarSolution, WedgeSolution, PROFILES
from invlab.spectral import Field, Grid2D

GRID = Grid2D(32, 32)


class TestTimeSeries:
    def test_rejects_nonincreasing_times(self):
        with pytest.raises(ValueError, match="increasing"):
            TimeSeries([0.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError, match="finite"):
            TimeSeries([0.0, 1.0], [1.0, np.inf])

    def test_window(self):
        s = TimeSeries(np.arange(5.0), np.arange(5.0) + 1)
        w = s.window(1.0, 3.0)
        assert list(w.t) == [1.0, 2.0, 3.0]


class TestSupGrad:
    def test_single_mode_x2(self):
        f = Field.from_function(GRID, lambda x1, x2: np.sin(x2))
        value, (x1, x2) = sup_grad(f)
        assert value == pytest.approx(1.0, abs=1e-12)
        assert min(abs(x2 - 0.0), abs(x2 - math.pi)) < 1e-12

    def test_constant(self):
        value, _ = sup_grad(Field(GRID, np.full(GRID.shape, 4.0)))
        assert value < 1e-13

    def test_cos_cos(self):
        f = Field.from_function(GRID, lambda x1, x2: np.cos(x1) * np.cos(x2))
        value, _ = sup_grad(f)
        # dense brute force on the closed form
        xs = np.linspace(0, 2 * math.pi, 400)
        x1m, x2m = np.meshgrid(xs, xs, indexing="ij")
        brute = np.max(np.hypot(np.sin(x1m) * np.cos(x2m), np.cos(x1m) * np.sin(x2m)))
        assert value == pytest.approx(1.0, abs=1e-10)
        assert brute == pytest.approx(1.0, abs=1e-4)

    def test_mode_amplitude_rule(self):
        # |grad| of A cos(k.x) peaks at |A| |k|
        f = Field.from_function(GRID, lambda x1, x2: 2.5 * np.cos(3 * x1 + 4 * x2))
        value, _ = sup_grad(f)
        assert value == pytest.approx(2.5 * 5.0, rel=1e-10)


class TestGrowthFit:
    def test_exact_exponential(self):
        t = np.linspace(0, 3, 20)
        fit = fit_growth_rate(TimeSeries(t, np.exp(t)), (0.0, 3.0))
        assert fit.rate == pytest.approx(1.0, abs=1e-10)
        assert fit.r2 == pytest.approx(1.0, abs=1e-12)

    def test_constant_series(self):
        t = np.linspace(0, 3, 20)
        fit = fit_growth_rate(TimeSeries(t, np.full(20, 7.0)), (0.0, 3.0))
        assert fit.rate == pytest.approx(0.0, abs=1e-12)

    def test_window_default_is_last_half(self):
        t = np.linspace(0, 4, 41)
        fit = fit_growth_rate(TimeSeries(t, np.exp(2 * t)))
        assert fit.window[0] == pytest.approx(2.0)

    def test_late_window_of_transient_exponential(self):
        # 2 e^t (e^t - 1) has asymptotic rate 2
        t = np.linspace(3.0, 6.5, 36)
        fit = fit_growth_rate(TimeSeries(t, 2 * np.exp(t) * (np.exp(t) - 1)), (4.0, 6.0))
        assert fit.rate == pytest.approx(2.0, abs=1e-2)

    def test_rejects_nonpositive_values(self):
        t = np.linspace(0, 1, 6)
        v = np.array([1.0, 2.0, 0.0, 3.0, 4.0, 5.0])
        with pytest.raises(ValueError, match="nonpositive"):
            fit_growth_rate(TimeSeries(t, v), (0.0, 1.0))

    def test_rejects_short_window(self):
        t = np.linspace(0, 1, 10)
        with pytest.raises(ValueError, match="5 samples"):
            fit_growth_rate(TimeSeries(t, np.exp(t)), (0.0, 0.2))


class TestBlowupExtrapolation:
    def test_exact_reciprocal_law(self):
        t = np.linspace(0, 0.8, 17)
        est = extrapolate_blowup(TimeSeries(t, 1.0 / (1.0 - t)), (0.0, 0.8))
        assert est.t_est == pytest.approx(1.0, abs=1e-8)
        assert est.warning is None

    def test_constant_series_never_blows_up(self):
        t = np.linspace(0, 1, 11)
        est = extrapolate_blowup(TimeSeries(t, np.full(11, 3.0)), (0.0, 1.0))
        assert est.t_est == math.inf

    def test_non_monotone_window_warns(self):
        t = np.linspace(0, 1, 11)
        v = 2.0 + np.sin(6 * t)
        est = extrapolate_blowup(TimeSeries(t, v), (0.0, 1.0))
        assert est.warning is not None


class TestResidual:
    def test_wedge_is_exact(self):
        solution = WedgeSolution(PROFILES["sin"])
        rng = np.random.default_rng(0)
        pts = list(zip(rng.uniform(-2, 2, 500),
                       rng.uniform(0.05, 2, 500) * rng.choice([-1, 1], 500),
                       rng.uniform(0, 2, 500)))
        res_theta, res_omega = residual(solution, ModelKind.BOUSSINESQ, pts)
        assert res_theta < 1e-11
        assert res_omega < 1e-11

    def test_moving_domain_special_example(self):
        solution = MovingDomainSolution(PROFILES["identity"], PROFILES["identity"])
        rng = np.random.default_rng(1)
        pts = list(zip(rng.uniform(-2, 2, 50),
                       rng.uniform(0.05, 2, 50) * rng.choice([-1, 1], 50),
                       rng.uniform(0, 2, 50)))
        res_theta, res_omega = residual(solution, ModelKind.BOUSSINESQ, pts)
        assert res_theta < 1e-11
        assert res_omega < 1e-11

    @pytest.mark.parametrize("eps", [1e-3, 1e-2])
    def test_linear_perturbation_shifts_omega_residual_exactly(self, eps):
        base = WedgeSolution(PROFILES["sin"])

        def perturbed(x1, x2, t):
            s = base.sample(x1, x2, t)
            return dataclasses.replace(s, theta=s.theta + eps * x1, dtheta_dx1=s.dtheta_dx1 + eps)

        rng = np.random.default_rng(2)
        pts = list(zip(rng.uniform(-2, 2, 100),
                       rng.uniform(0.05, 2, 100) * rng.choice([-1, 1], 100),
                       rng.uniform(0, 2, 100)))
        _, res_omega = residual(perturbed, ModelKind.BOUSSINESQ, pts)
        assert res_omega == pytest.approx(eps, rel=1e-10)

    def test_stationary_scalar(self):
        solution = UniformScalarSolution(1.0)
        pts = [(0.3, 0.5, 0.1), (-1.0, -0.7, 1.5)]
        res_theta, res_omega = residual(solution, ModelKind.SINGULAR_SCALAR, pts)
        assert res_theta == 0.0
        assert res_omega is None

    def test_missing_partials_rejected(self):
        solution = ModifiedSolution(PROFILES["sin"], PROFILES["sign"])

        def broken(x1, x2, t):
            s = solution.sample(x1, x2, t)
            return dataclasses.replace(s, domega_dt=None)

        with pytest.raises(ValueError, match="domega_dt"):
            residual(broken, ModelKind.MODIFIED_BOUSSINESQ, [(0.0, 0.5, 0.5)])


class TestResidualFromStates:
    def _snapshot_triple(self, dt):
        grid = Grid2D(48, 48)
        theta = Field.from_function(grid, lambda x1, x2: np.sin(x1) * np.cos(x2))
        omega = Field.from_function(grid, lambda x1, x2: np.cos(x1) * np.sin(2 * x2))
        state = State(ModelKind.BOUSSINESQ, 0.0, theta, omega)
        ctrl = StepControl(dt=dt)
        s1 = rk4_step(state, ctrl)
        s2 = rk4_step(s1, ctrl)
        return state, s1, s2

    def test_second_order_in_snapshot_spacing(self):
        errors = []
        for dt in (1e-2, 5e-3):
            prev, mid, nxt = self._snapshot_triple(dt)
            res_theta, res_omega = residual_from_states(prev, mid, nxt)
            errors.append(max(res_theta, res_omega))
        assert errors[0] < 1e-3
        assert 3.0 < errors[0] / errors[1] < 5.0

    def test_rejects_unordered_snapshots(self):
        prev, mid, nxt = self._snapshot_triple(1e-2)
        with pytest.raises(ValueError, match="ordered"):
            residual_from_states(mid, prev, nxt)


class TestSymmetryError:
    def test_even_field(self):
        f = Field.from_function(GRID, lambda x1, x2: np.cos(x2))
        assert symmetry_error(f, "even") < 1e-15

    def test_sine_against_even(self):
        f = Field.from_function(GRID, lambda x1, x2: np.sin(x2))
        assert symmetry_error(f, "even") == pytest.approx(2.0, abs=1e-12)

    def test_sine_is_odd(self):
        f = Field.from_function(GRID, lambda x1, x2: np.sin(x2))
        assert symmetry_error(f, "odd") < 1e-15

    def test_unknown_parity(self):
        with pytest.raises(ValueError):
            symmetry_error(Field.zeros(GRID), "sideways")


class TestConservationReport:
    def test_single_state_zero_drift(self):
        state = State(ModelKind.SINGULAR_SCALAR, 0.0,
                      Field.from_function(GRID, lambda x1, x2: np.cos(x1) * np.cos(x2)))
        rows = conservation_report([state])
        assert len(rows) == 1
        assert rows[0].drift_l2_theta == 0.0
        assert rows[0].drift_linf_theta == 0.0

    def test_transported_oracle_preserves_sup(self):
        # sampling the wedge scalar at two times: the sup norm is invariant
        solution = WedgeSolution(PROFILES["sin"])
        grid = Grid2D(64, 256)

        def as_state(t):
            theta = Field.from_function(grid, lambda x1, x2: solution.theta(x2, t))
            return State(ModelKind.SINGULAR_SCALAR, t, theta)

        rows = conservation_report([as_state(0.0), as_state(1.0)])
        assert rows[1].drift_linf_theta < 1e-3

    def test_run_conservation(self):
        grid = Grid2D(64, 64)
        state = State(ModelKind.SINGULAR_SCALAR, 0.0,
                      Field.from_function(grid, lambda x1, x2: np.cos(x1) * np.cos(x2)))
        result = integrate(state, StepControl(dt=2e-3), 0.25)
        rows = conservation_report([state, result.state])
        assert rows[1].drift_l2_theta < 1e-8

    def test_csv_rendering(self):
        state = State(ModelKind.BOUSSINESQ, 0.0, Field.zeros(GRID), Field.zeros(GRID))
        text = format_conservation_csv(conservation_report([state]))
        assert text.splitlines()[0].startswith("t,l2_theta")
        assert len(text.splitlines()) == 2


class TestAxisSlope:
    def test_matches_full_gradient_on_axis(self):
        f = Field.from_function(GRID, lambda x1, x2: np.cos(x1) * np.cos(x2))
        assert min_axis_slope(f) == pytest.approx(-1.0, abs=1e-12)

    def test_l2_norm_of_unit_constant(self):
        f = Field(GRID, np.ones(GRID.shape))
        assert l2_norm(f) == pytest.approx(2 * math.pi, rel=1e-14)
