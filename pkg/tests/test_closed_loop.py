# tests/test_closed_loop.py
"""Long closed-loop runs with Zinc constants. Deselect with ``-m "not slow"``."""
import itertools
import time

import numpy as np
import pytest

from stefanctl.config.settings import settings
from stefanctl.core.analysis import energy_balance, lyapunov_decay, safety_monitor
from stefanctl.core.analysis.lyapunov import certify
from stefanctl.core.controller.flux_ode import qc_ode_residual
from stefanctl.core.solver import simulate
from stefanctl.models.gains import ControlGains
from stefanctl.models.physical import InitialData, LinearProfile
from stefanctl.models.run_config import load_run_config, with_overrides
from stefanctl.models.solver import SolverConfig
from stefanctl.services.run_service import run_service

from conftest import CONFIG_DIR, T_MELT, zinc

pytestmark = pytest.mark.slow

DATA = InitialData(s0=0.1, v0=0.0, profile=LinearProfile(surplus=10.0))
REFERENCE_GAINS = ControlGains(c1=0.1, c2=0.2, s_r=0.2)
WARMUP_S = 20.0
RUNTIME_BOUND_S = 60.0


@pytest.fixture(scope="module")
def reference_result():
    """The bundled reference configuration at full resolution, with its wall-clock time."""
    cfg = load_run_config(CONFIG_DIR / "zinc_2nd.yaml")
    started = time.perf_counter()
    result = run_service.execute(cfg)
    return result, time.perf_counter() - started


@pytest.fixture(scope="module")
def reference_run(reference_result):
    return reference_result[0].trajectory


@pytest.fixture(scope="module")
def refinement():
    """Closed-loop runs with dx and dt halved together."""
    params = zinc(epsilon=20.0)
    runs = []
    for nx, dt in ((32, 1.0), (64, 0.5), (128, 0.25)):
        cfg = SolverConfig(nx=nx, dt=dt, t_final=600.0)
        runs.append(simulate(DATA, params, REFERENCE_GAINS, cfg, 2))
    return runs


class TestReferenceRun:
    def test_resolution_and_runtime(self, reference_result):
        result, elapsed = reference_result
        assert result.trajectory.dt == 0.25
        assert result.trajectory.snapshot_temp.shape[1] == 129
        assert result.trajectory.t[-1] == pytest.approx(3000.0)
        assert elapsed < RUNTIME_BOUND_S
        assert result.report.exit_code == 0
        assert result.report.final_s == pytest.approx(0.198701, abs=1e-4)
        assert result.report.target_ok

    def test_reaches_setpoint_monotonically(self, reference_run):
        assert reference_run.completed
        assert np.all(np.diff(reference_run.s) >= -1e-8)
        assert abs(reference_run.s[-1] - 0.2) <= 0.002
        assert reference_run.s.max() <= 0.2 + 1e-9

    def test_safety_holds(self, reference_run):
        report = safety_monitor(reference_run, DATA, zinc(epsilon=20.0), REFERENCE_GAINS)
        assert report.all_satisfied
        assert report.implication_holds
        assert reference_run.min_temp.min() >= T_MELT - 1e-6

    def test_interface_gradient_stays_nonpositive(self, reference_run):
        assert np.all(reference_run.tx_interface <= settings.tol_grad)
        assert reference_run.flags["tx_nonpos"].all()
        assert reference_run.tx_interface[0] < 0.0

    def test_flux_starts_positive_and_stays_nonnegative(self, reference_run):
        assert reference_run.qc[0] > 0.0
        assert reference_run.qc.min() >= -1e-9 * np.abs(reference_run.qc).max()

    def test_boundary_temperature_peaks_inside_horizon(self, reference_run):
        peak = int(np.argmax(reference_run.T_boundary))
        assert 0 < peak < len(reference_run) - 1
        assert reference_run.T_boundary[-1] < reference_run.T_boundary[peak]

    def test_target_boundary_value(self, reference_run):
        assert np.max(np.abs(reference_run.w_end)) <= 1e-8 * np.max(reference_run.u_max)


class TestLyapunovDecay:
    def test_phi_decays_with_certified_gains(self):
        params = zinc(epsilon=20.0)
        gains = ControlGains(c1=0.1, c2=0.1, s_r=0.2)
        cert = certify(gains, params)
        assert cert.lambda_pd_found
        trajectory = simulate(DATA, params, gains, SolverConfig(nx=32, dt=1.0, t_final=1500.0), 2,
                              cert=cert.best)
        decay = lyapunov_decay(trajectory.t, trajectory.Phi)
        assert decay.rate < 0.0
        assert trajectory.Phi[-1] < trajectory.Phi[0]
        assert np.all(np.isfinite(trajectory.V))


class TestThirdOrder:
    def test_converges_with_nonnegative_barriers(self):
        params = zinc(epsilon1=10.0, epsilon2=10.0)
        data = InitialData(s0=0.1, v0=0.0, a0=0.0, profile=LinearProfile(surplus=10.0))
        gains = ControlGains(c1=0.1, c2=0.2, c3=0.25, s_r=0.2)
        trajectory = simulate(data, params, gains, SolverConfig(nx=32, dt=1.0, t_final=3000.0), 3)
        assert trajectory.completed
        assert abs(trajectory.s[-1] - 0.2) <= 0.005
        assert trajectory.flags["sdot_nonneg"].all()
        assert trajectory.flags["h2_nonneg"].all()
        assert trajectory.flags["qc_nonneg"].all()


class TestRefinement:
    def _warm(self, residual, dt):
        return residual[int(round(WARMUP_S / dt)):]

    def test_energy_residual_is_second_order(self, refinement):
        sizes = [np.max(np.abs(self._warm(energy_balance(run).residual, run.dt))) for run in refinement]
        assert sizes[1] < sizes[0]
        assert np.log2(sizes[1] / sizes[2]) >= 1.6

    def test_flux_ode_residual_shrinks(self, refinement):
        params = zinc(epsilon=20.0)
        rms = []
        for run in refinement:
            residual = self._warm(qc_ode_residual(run, REFERENCE_GAINS, params).residual, run.dt)
            rms.append(np.sqrt(np.mean(residual ** 2)))
        assert rms[0] / rms[1] >= 3.0
        assert rms[1] / rms[2] >= 3.0

    def test_boundary_derivative_of_target_shrinks(self, refinement):
        peaks = [np.max(np.abs(run.wx_origin[int(round(WARMUP_S / run.dt)):])) for run in refinement]
        assert peaks[1] < peaks[0]
        assert np.log2(peaks[1] / peaks[2]) >= 1.6


def test_nonnegative_flux_implies_safety_across_configs():
    base = load_run_config(CONFIG_DIR / "zinc_2nd.yaml")
    base = with_overrides(base, {"solver.nx": 16, "solver.dt": 2.0, "solver.t_final": 200.0})
    for c2, eps, surplus in itertools.product((0.1, 0.15, 0.2), (10.0, 20.0, 40.0), (5.0, 10.0, 20.0)):
        cfg = with_overrides(base, {"gains.c2": c2, "params.epsilon": eps, "initial.profile.surplus": surplus})
        report = run_service.execute(cfg).report
        assert report.safety.implication_holds, (c2, eps, surplus)
