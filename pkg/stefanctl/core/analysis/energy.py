# stefanctl/core/analysis/energy.py
import numpy as np
from stefanctl.core.model.quadrature import trapezoid
from stefanctl.models.physical import PhysicalParams
from stefanctl.models.reports import ResidualSummary
from stefanctl.models.state import SimState
from stefanctl.models.trajectory import Trajectory
from stefanctl.utils.exceptions import ValidationError


def stored_energy(state: SimState, params: PhysicalParams) -> float:
    """Sensible heat of the liquid plus the latent heat bound in the interface state [J/m^2].

    Its time derivative equals the boundary heat flux qc along exact solutions.
    """
    k = params.k_cond
    sensible = (k / params.alpha) * trapezoid(state.temp - params.t_melt, state.x)
    if state.s_ddot is None:
        latent_state = state.s + params.epsilon * state.s_dot
    else:
        e1, e2 = params.epsilon1, params.epsilon2
        latent_state = state.s + (e1 + e2) * state.s_dot + e1 * e2 * state.s_ddot
    return sensible + (k / params.beta) * latent_state


def energy_balance(trajectory: Trajectory) -> ResidualSummary:
    """|dE - dt (qc_n + qc_{n+1}) / 2| / dt per step [W/m^2]."""
    if len(trajectory) < 2:
        raise ValidationError("TRAJECTORY_TOO_SHORT", "Energy balance needs at least two records")
    dt = np.diff(trajectory.t)
    supplied = 0.5 * dt * (trajectory.qc[1:] + trajectory.qc[:-1])
    residual = np.abs(np.diff(trajectory.energy) - supplied) / dt
    return ResidualSummary(
        residual=residual,
        max=float(residual.max()),
        rms=float(np.sqrt(np.mean(residual ** 2))),
    )
