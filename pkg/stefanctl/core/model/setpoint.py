# stefanctl/core/model/setpoint.py
import logging
from stefanctl.config.settings import settings
from stefanctl.models.common import SetpointRelaxation
from stefanctl.models.physical import InitialData, PhysicalParams
from stefanctl.utils.exceptions import ValidationError

logger = logging.getLogger(__name__)


def surplus_energy(data: InitialData, params: PhysicalParams) -> float:
    """(beta/alpha) * integral of T0 - Tm over [0, s0], in metres."""
    integral = data.profile.surplus_integral(data.s0, params.t_melt)
    return params.beta / params.alpha * integral


def min_setpoint_2nd(data: InitialData, params: PhysicalParams) -> float:
    """Lower bound on admissible setpoints: s0 + eps v0 + (beta/alpha) int (T0 - Tm)."""
    params.require_order(2)
    return data.s0 + params.epsilon * data.v0 + surplus_energy(data, params)


def setpoint_relaxation(params: PhysicalParams, relaxation: SetpointRelaxation) -> float:
    if relaxation == SetpointRelaxation.EPSILON1:
        return params.epsilon1
    if relaxation == SetpointRelaxation.EPSILON2:
        return params.epsilon2
    return params.epsilon1 + params.epsilon2


def min_setpoint_3rd(
    data: InitialData,
    params: PhysicalParams,
    c1: float,
    c2: float,
    relaxation: SetpointRelaxation = SetpointRelaxation.EPSILON1,
) -> float:
    """Third-order bound s0 + (c2/c1)(eps v0 + (beta/alpha) int (T0 - Tm)).

    The single relaxation time inside the bracket is configurable; ``epsilon1`` is the
    default because it is the one that multiplies sddot in the barrier h2.
    """
    params.require_order(3)
    margin = c1 * settings.gain_margin_rel
    if not (c1 > 0 and c2 >= c1 - margin):
        raise ValidationError(
            "GAIN_PRECONDITION",
            f"Third-order setpoint bound needs 0 < c1 <= c2, got c1={c1}, c2={c2}",
        )
    eps = setpoint_relaxation(params, relaxation)
    return data.s0 + (c2 / c1) * (eps * data.v0 + surplus_energy(data, params))
