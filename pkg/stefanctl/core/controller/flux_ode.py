# stefanctl/core/controller/flux_ode.py
import numpy as np
from stefanctl.models.gains import ControlGains
from stefanctl.models.physical import PhysicalParams
from stefanctl.models.reports import ResidualSummary
from stefanctl.models.trajectory import Trajectory
from stefanctl.utils.exceptions import ValidationError


def qc_ode_residual(
    trajectory: Trajectory,
    gains: ControlGains,
    params: PhysicalParams,
    skip: int = 0,
) -> ResidualSummary:
    """Residual of dqc/dt = -c2 qc + (k/beta)(c2 - c1) sdot along a closed-loop run.

    dqc/dt is a central difference over the uniformly spaced records; the final record
    is dropped when the last step was partial. ``skip`` drops leading interior records.
    """
    params.require_order(2)
    t, qc, s_dot = trajectory.t, trajectory.qc, trajectory.s_dot
    n = trajectory.uniform_length()
    if n < 3:
        raise ValidationError("TRAJECTORY_TOO_SHORT", f"Need at least 3 uniform records, got {n}")

    dt = trajectory.dt
    derivative = (qc[2:n] - qc[: n - 2]) / (2.0 * dt)
    rhs = -gains.c2 * qc[1 : n - 1] + (params.k_cond / params.beta) * (gains.c2 - gains.c1) * s_dot[1 : n - 1]
    residual = (derivative - rhs)[skip:]
    if residual.size == 0:
        raise ValidationError("TRAJECTORY_TOO_SHORT", "Nothing left after skipping leading records")
    return ResidualSummary(
        residual=residual,
        max=float(np.max(np.abs(residual))),
        rms=float(np.sqrt(np.mean(residual ** 2))),
    )
