# stefanctl/core/controller/laws.py
import numpy as np
from stefanctl.core.model.quadrature import trapezoid
from stefanctl.models.gains import ControlGains
from stefanctl.models.physical import PhysicalParams
from stefanctl.models.state import SimState
from stefanctl.utils.exceptions import NumericalError, ValidationError


def _stored_heat(state: SimState, params: PhysicalParams) -> float:
    """Integral of T - Tm over the liquid domain [K m]."""
    return trapezoid(state.temp - params.t_melt, state.x)


def _require_finite(state: SimState) -> None:
    scalars = [state.s, state.s_dot] + ([state.s_ddot] if state.s_ddot is not None else [])
    if not (np.all(np.isfinite(scalars)) and np.all(np.isfinite(state.temp))):
        raise NumericalError("NON_FINITE_STATE", f"Non-finite state at t={state.t}")


def control_2nd(state: SimState, params: PhysicalParams, gains: ControlGains) -> float:
    """qc = -(k c2/alpha) int (T - Tm) dx - (k/beta)(c1 (s - s_r) + c2 eps sdot)  [W/m^2]"""
    _require_finite(state)
    k, alpha, beta = params.k_cond, params.alpha, params.beta
    heat = _stored_heat(state, params)
    return (
        -(k * gains.c2 / alpha) * heat
        - (k / beta) * (gains.c1 * (state.s - gains.s_r) + gains.c2 * params.epsilon * state.s_dot)
    )


def control_3rd(state: SimState, params: PhysicalParams, gains: ControlGains) -> float:
    """qc = -(k c3/alpha) int (T - Tm) dx
           - (k/beta)(c1 (s - s_r) + c2 (e1 + e2) sdot + c3 e1 e2 sddot)"""
    if state.s_ddot is None:
        raise ValidationError("MISSING_ACCELERATION", "Third-order control needs sddot in the state")
    if gains.c3 is None:
        raise ValidationError("MISSING_GAIN", "Third-order control needs c3")
    _require_finite(state)
    k, alpha, beta = params.k_cond, params.alpha, params.beta
    e1, e2 = params.epsilon1, params.epsilon2
    heat = _stored_heat(state, params)
    return (
        -(k * gains.c3 / alpha) * heat
        - (k / beta) * (
            gains.c1 * (state.s - gains.s_r)
            + gains.c2 * (e1 + e2) * state.s_dot
            + gains.c3 * e1 * e2 * state.s_ddot
        )
    )


def control_law(state: SimState, params: PhysicalParams, gains: ControlGains) -> float:
    if params.order == 2:
        return control_2nd(state, params, gains)
    return control_3rd(state, params, gains)
