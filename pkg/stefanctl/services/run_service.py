# stefanctl/services/run_service.py
import logging
import numpy as np
from pathlib import Path
from pydantic import BaseModel, ConfigDict
from typing import Optional
from stefanctl.config.settings import settings
from stefanctl.core.analysis.cbf import cbf_residual
from stefanctl.core.analysis.energy import energy_balance
from stefanctl.core.analysis.lyapunov import lyapunov_decay
from stefanctl.core.analysis.safety import safety_monitor
from stefanctl.core.controller.flux_ode import qc_ode_residual
from stefanctl.core.solver.simulate import simulate
from stefanctl.models.common import ControllerMode
from stefanctl.models.reports import CheckReport, ResidualStats, RunReport
from stefanctl.models.run_config import RunConfig
from stefanctl.models.trajectory import Trajectory
from stefanctl.services.check_service import check_service
from stefanctl.services.storage import REPORT_FILE, storage_service
from stefanctl.utils.exceptions import ValidationError
from stefanctl.utils.timing import PerformanceTimer

logger = logging.getLogger(__name__)


class RunResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    report: RunReport
    trajectory: Trajectory
    directory: Optional[Path] = None


class RunService:
    def execute(self, cfg: RunConfig, directory: Optional[Path] = None) -> RunResult:
        """Check, simulate and analyse one configuration.

        Outputs are written only when ``directory`` is given. Raises ValidationError when
        the initial data or the setpoint restriction rule the run out.
        """
        cfg = cfg.to_si()
        timer = PerformanceTimer(cfg.name)

        with timer.time_step("check"):
            check = check_service.check(cfg)
        failures = check.gating_failures()
        if failures:
            raise ValidationError(
                "ASSUMPTION_VIOLATED",
                f"Configuration '{cfg.name}' violates {', '.join(failures)}",
                debug_info="; ".join(v.detail for v in check.validation.violations) or None,
            )

        cert = check.certificate.best if check.certificate is not None else None
        with timer.time_step("simulate"):
            trajectory = simulate(
                cfg.initial,
                cfg.params,
                cfg.gains,
                cfg.solver,
                cfg.order,
                controller=cfg.controller,
                cert=cert,
                snapshot_interval=cfg.output.snapshot_interval,
            )

        with timer.time_step("analysis"):
            report = self._analyse(cfg, trajectory, check)

        if directory is not None:
            with timer.time_step("write"):
                directory = storage_service.prepare(directory)
                storage_service.write_trajectory(trajectory, directory)
                storage_service.write_snapshots(trajectory, directory)

        report = report.model_copy(update={"runtime_s": timer.get_total_time(), "timings": timer.timings()})
        if directory is not None:
            storage_service.write_report(report, directory / REPORT_FILE)
        timer.log_summary()
        return RunResult(report=report, trajectory=trajectory, directory=directory)

    def _analyse(self, cfg: RunConfig, trajectory: Trajectory, check: CheckReport) -> RunReport:
        params, gains = cfg.params, cfg.gains
        safety = safety_monitor(trajectory, cfg.initial, params, gains)
        decay = lyapunov_decay(trajectory.t, trajectory.Phi)
        skip = cfg.solver.startup_steps

        qc_ode = None
        closed_loop = cfg.controller.mode == ControllerMode.CLOSED_LOOP and not cfg.controller.flip_sign
        if cfg.order == 2 and closed_loop:
            qc_ode = self._optional(lambda: qc_ode_residual(trajectory, gains, params, skip=skip))
        cbf = None
        if cfg.order == 3:
            cbf = self._optional(lambda: cbf_residual(trajectory, params, skip=skip))
        energy = self._optional(lambda: energy_balance(trajectory))

        target, target_ok, wx_origin = None, None, None
        if gains is not None:
            u_scale = float(np.max(trajectory.u_max)) or 1.0
            target = float(np.max(np.abs(trajectory.w_end))) / u_scale
            target_ok = target <= settings.tol_target_rel
            wx_origin = float(np.max(np.abs(trajectory.wx_origin[skip + 1:]))) if len(trajectory) > skip + 1 else None

        exit_code = 0 if trajectory.completed and safety.all_satisfied else 1
        if exit_code:
            logger.warning(f"[{cfg.name}] Run finished with violations (exit {exit_code})")
        return RunReport(
            name=cfg.name,
            order=cfg.order,
            mode=cfg.controller.mode,
            completed=trajectory.completed,
            termination=trajectory.termination,
            check=check,
            safety=safety,
            phi_decay=decay,
            final_s=float(trajectory.s[-1]),
            final_error=abs(float(trajectory.s[-1]) - gains.s_r) if gains is not None else None,
            energy_balance=ResidualStats.of(energy),
            qc_ode_residual=ResidualStats.of(qc_ode),
            cbf_residual=ResidualStats.of(cbf),
            max_target_residual=target,
            target_ok=target_ok,
            max_wx_origin=wx_origin,
            runtime_s=0.0,
            exit_code=exit_code,
        )

    @staticmethod
    def _optional(compute):
        try:
            return compute()
        except ValidationError as exc:
            logger.info(f"Diagnostic skipped: {exc.message}")
            return None


run_service = RunService()
