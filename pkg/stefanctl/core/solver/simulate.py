# stefanctl/core/solver/simulate.py
import logging
import math
import numpy as np
from typing import Callable, Dict, List, Optional
from stefanctl.config.settings import settings
from stefanctl.core.analysis.energy import stored_energy
from stefanctl.core.analysis.lyapunov import lyapunov_values
from stefanctl.core.analysis.safety import constraint_margins
from stefanctl.core.analysis.transform import backstepping_transform
from stefanctl.core.controller.laws import control_law
from stefanctl.core.model.states import initial_state
from stefanctl.core.model.validation import validate_initial
from stefanctl.models.common import ControllerMode, Scheme
from stefanctl.models.gains import ControlGains
from stefanctl.models.physical import InitialData, PhysicalParams
from stefanctl.models.reports import LyapunovCert
from stefanctl.models.solver import ControllerConfig, SolverConfig
from stefanctl.models.state import SimState
from stefanctl.models.trajectory import Termination, Trajectory
from stefanctl.utils.exceptions import ConstraintViolation, ValidationError
from .landau import boundary_flux_gradient
from .stepper import step

logger = logging.getLogger(__name__)

TEMPERATURE_BELOW_MELT = "TEMPERATURE_BELOW_MELT"


def time_steps(t_final: float, dt: float) -> List[float]:
    """Uniform steps of dt followed by one partial step when t_final is not a multiple of dt."""
    full = int(math.floor(t_final / dt + 1e-9))
    steps = [dt] * full
    remainder = t_final - full * dt
    if remainder > 1e-9 * dt:
        steps.append(remainder)
    return steps


def snapshot_stride(dt: float, interval: Optional[float] = None) -> int:
    interval = settings.snapshot_interval_s if interval is None else interval
    return max(1, int(math.floor(interval / dt + 1e-9)))


class _Recorder:
    """Collects the scalar channels every step and the temperature every ``stride`` steps."""

    def __init__(
        self,
        params: PhysicalParams,
        gains: Optional[ControlGains],
        cert: Optional[LyapunovCert],
        stencil: int,
        stride: int,
    ):
        self.params = params
        self.gains = gains
        self.cert = cert
        self.stencil = stencil
        self.stride = stride
        self.channels: Dict[str, List[float]] = {
            name: []
            for name in (
                "t", "s", "s_dot", "s_ddot", "qc", "T_boundary", "V", "Phi",
                "tx_interface", "min_temp", "energy", "w_end", "wx_origin", "u_max",
            )
        }
        self.snapshot_t: List[float] = []
        self.snapshot_s: List[float] = []
        self.snapshot_temp: List[np.ndarray] = []

    def record(self, state: SimState, qc: float, index: int, force_snapshot: bool = False) -> None:
        c = self.channels
        c["t"].append(state.t)
        c["s"].append(state.s)
        c["s_dot"].append(state.s_dot)
        c["s_ddot"].append(state.s_ddot if state.s_ddot is not None else math.nan)
        c["qc"].append(qc)
        c["T_boundary"].append(float(state.temp[0]))
        c["tx_interface"].append(boundary_flux_gradient(state, self.stencil)[1])
        c["min_temp"].append(float(state.temp.min()))
        c["energy"].append(stored_energy(state, self.params))
        c["u_max"].append(float(np.max(np.abs(state.temp - self.params.t_melt))))

        if self.gains is None:
            for name in ("V", "Phi", "w_end", "wx_origin"):
                c[name].append(math.nan)
        else:
            transformed = backstepping_transform(state, self.gains, self.params, self.stencil)
            values = lyapunov_values(transformed, self.cert, self.gains.s_r)
            c["V"].append(values.V)
            c["Phi"].append(values.Phi)
            c["w_end"].append(float(transformed.w[-1]))
            c["wx_origin"].append(float(transformed.w_x[0]))

        if force_snapshot or index % self.stride == 0:
            self.snapshot_t.append(state.t)
            self.snapshot_s.append(state.s)
            self.snapshot_temp.append(state.temp.copy())

    def build(self, order: int, mode: ControllerMode, dt: float, xi: np.ndarray,
              termination: Optional[Termination]) -> Trajectory:
        arrays = {name: np.asarray(values, dtype=float) for name, values in self.channels.items()}
        s_ddot = arrays.pop("s_ddot")
        return Trajectory(
            order=order,
            mode=mode,
            dt=dt,
            s_ddot=s_ddot if order == 3 else None,
            snapshot_t=np.asarray(self.snapshot_t),
            snapshot_s=np.asarray(self.snapshot_s),
            snapshot_temp=np.vstack(self.snapshot_temp),
            xi_grid=xi,
            termination=termination,
            **arrays,
        )


def _flux_source(
    mode: ControllerMode,
    controller: ControllerConfig,
    params: PhysicalParams,
    gains: Optional[ControlGains],
) -> Callable[[SimState], float]:
    sign = -1.0 if controller.flip_sign else 1.0
    if mode == ControllerMode.CLOSED_LOOP:
        if gains is None:
            raise ValidationError("MISSING_GAINS", "Closed-loop runs need control gains")
        return lambda state: sign * control_law(state, params, gains)
    schedule = controller.schedule
    if schedule is None:
        raise ValidationError("MISSING_SCHEDULE", "Open-loop runs need a qc schedule")
    return lambda state: sign * schedule.at(state.t)


def simulate(
    data: InitialData,
    params: PhysicalParams,
    gains: Optional[ControlGains],
    cfg: SolverConfig,
    order: int,
    controller: Optional[ControllerConfig] = None,
    cert: Optional[LyapunovCert] = None,
    snapshot_interval: Optional[float] = None,
) -> Trajectory:
    """Run the coupled model from the initial data to ``cfg.t_final``.

    Closed loop uses a predictor-corrector on the flux: a trial step with qc frozen at t_n
    gives the flux at t_{n+1}, and the real step then uses both end values. A validity
    violation ends the run early; the returned trajectory holds every record up to and
    including the violating state together with a termination diagnostic.
    """
    controller = controller or ControllerConfig()
    params.require_order(order)
    verdict = validate_initial(data, params, order)
    if not verdict.ok:
        raise ValidationError("INVALID_INITIAL_DATA", f"Initial data violates {', '.join(verdict.names())}")

    mode = controller.mode
    flux = _flux_source(mode, controller, params, gains)
    closed_loop = mode == ControllerMode.CLOSED_LOOP

    state = initial_state(data, params, cfg.nx, order)
    recorder = _Recorder(params, gains, cert, cfg.flux_stencil, snapshot_stride(cfg.dt, snapshot_interval))
    steps = time_steps(cfg.t_final, cfg.dt)
    logger.info(
        f"Simulating order {order} {mode.value} run: nx={cfg.nx}, dt={cfg.dt}, "
        f"{len(steps)} steps to t={cfg.t_final}"
    )

    qc = flux(state)
    recorder.record(state, qc, 0)
    termination: Optional[Termination] = None
    floor_temp = params.t_melt - settings.tol_temp

    for index, dt in enumerate(steps, start=1):
        startup = cfg.scheme == Scheme.CRANK_NICOLSON and index <= cfg.startup_steps
        try:
            if closed_loop:
                trial = step(state, qc, params, cfg, qc_next=qc, dt=dt, startup=startup)
                qc_next = flux(trial)
            else:
                qc_next = controller.schedule.at(state.t + dt) * (-1.0 if controller.flip_sign else 1.0)
            state = step(state, qc, params, cfg, qc_next=qc_next, dt=dt, startup=startup)
        except ConstraintViolation as exc:
            logger.warning(f"Run terminated at t={exc.time}: {exc.message}")
            termination = Termination(error_code=exc.error_code, message=exc.message, time=exc.time)
            break

        qc = flux(state)
        last = index == len(steps)
        coldest = float(state.temp.min())
        violated = coldest < floor_temp
        recorder.record(state, qc, index, force_snapshot=last or violated)
        if violated:
            message = f"Temperature {coldest} K fell below the melting temperature at t={state.t}"
            logger.warning(f"Run terminated: {message}")
            termination = Termination(error_code=TEMPERATURE_BELOW_MELT, message=message, time=state.t)
            break

    if termination is not None and recorder.snapshot_t[-1] != state.t:
        recorder.snapshot_t.append(state.t)
        recorder.snapshot_s.append(state.s)
        recorder.snapshot_temp.append(state.temp.copy())

    trajectory = recorder.build(order, mode, cfg.dt, state.xi_grid, termination)
    margins = constraint_margins(trajectory, data, params, gains.s_r if gains is not None else None)
    trajectory = trajectory.with_flags({name: margin >= 0.0 for name, margin in margins.items()})
    logger.info(
        f"Run finished at t={trajectory.t[-1]:.6g}: s={trajectory.s[-1]:.6g} m, "
        f"{len(trajectory)} records, {trajectory.snapshot_t.size} snapshots"
    )
    return trajectory
