# stefanctl/core/analysis/cbf.py
import numpy as np
from stefanctl.models.physical import PhysicalParams
from stefanctl.models.reports import CbfValues, ResidualSummary
from stefanctl.models.state import SimState
from stefanctl.models.trajectory import Trajectory
from stefanctl.utils.exceptions import ValidationError


def cbf_chain(state: SimState, params: PhysicalParams) -> CbfValues:
    """h1 = sdot and h2 = eps1 sddot + sdot for the third-order interface."""
    params.require_order(3)
    if state.s_ddot is None:
        raise ValidationError("MISSING_ACCELERATION", "CBF chain needs sddot in the state")
    return CbfValues(h1=state.s_dot, h2=params.epsilon1 * state.s_ddot + state.s_dot)


def cbf_residual(trajectory: Trajectory, params: PhysicalParams, skip: int = 0) -> ResidualSummary:
    """Residual of eps2 dh2/dt + h2 + beta T_x(s) = 0 over the recorded run, with dh2/dt as a
    central difference on the uniform records."""
    params.require_order(3)
    if trajectory.s_ddot is None:
        raise ValidationError("MISSING_ACCELERATION", "Trajectory has no sddot channel")
    n = trajectory.uniform_length()
    if n < 3:
        raise ValidationError("TRAJECTORY_TOO_SHORT", f"Need at least 3 uniform records, got {n}")

    h2 = params.epsilon1 * trajectory.s_ddot[:n] + trajectory.s_dot[:n]
    derivative = (h2[2:] - h2[:-2]) / (2.0 * trajectory.dt)
    residual = (
        params.epsilon2 * derivative + h2[1:-1] + params.beta * trajectory.tx_interface[1 : n - 1]
    )[skip:]
    if residual.size == 0:
        raise ValidationError("TRAJECTORY_TOO_SHORT", "Nothing left after skipping leading records")
    return ResidualSummary(
        residual=residual,
        max=float(np.max(np.abs(residual))),
        rms=float(np.sqrt(np.mean(residual ** 2))),
    )
