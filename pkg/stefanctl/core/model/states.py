# stefanctl/core/model/states.py
import numpy as np
from stefanctl.models.physical import InitialData, PhysicalParams
from stefanctl.models.state import ReferenceErrorState, SimState
from stefanctl.utils.exceptions import ValidationError


def initial_state(data: InitialData, params: PhysicalParams, nx: int, order: int) -> SimState:
    """Sample T0 on nx + 1 uniform nodes of xi = x/s0 and pin the interface node to Tm."""
    params.require_order(order)
    if order == 3 and data.a0 is None:
        raise ValidationError("MISSING_ACCELERATION", "Third-order runs need a0")
    xi = np.linspace(0.0, 1.0, nx + 1)
    temp = data.profile.sample(xi * data.s0, data.s0, params.t_melt)
    temp[-1] = params.t_melt
    return SimState(
        t=0.0,
        xi_grid=xi,
        temp=temp,
        s=data.s0,
        s_dot=data.v0,
        s_ddot=data.a0 if order == 3 else None,
    )


def reference_error(state: SimState, params: PhysicalParams, s_r: float) -> ReferenceErrorState:
    interface = state.interface_vector()
    interface[0] -= s_r
    return ReferenceErrorState(x=state.x, u=state.temp - params.t_melt, X=interface)
