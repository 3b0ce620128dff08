# stefanctl/core/model/validation.py
import logging
import numpy as np
from typing import List
from stefanctl.config.settings import settings
from stefanctl.models.physical import InitialData, PhysicalParams, TabulatedProfile
from stefanctl.models.reports import AssumptionViolation, ValidationVerdict
from stefanctl.utils.exceptions import ValidationError

logger = logging.getLogger(__name__)

ASSUMPTION_DOMAIN = "assumption1_domain"
ASSUMPTION_TEMPERATURE = "assumption1_temperature"
ASSUMPTION_COMPATIBILITY = "assumption1_compatibility"
ASSUMPTION_VELOCITY = "assumption2_velocity"
ASSUMPTION_ACCELERATION = "assumption5_acceleration"
PROFILE_ORDER = "profile_order"
PROFILE_SPAN = "profile_span"


def validate_initial(data: InitialData, params: PhysicalParams, order: int) -> ValidationVerdict:
    """Check the initial data against the model assumptions.

    Returns every violated assumption with its offending value. Raises only for inputs
    that cannot be evaluated at all (empty or non-finite profiles).
    """
    params.require_order(order)
    _check_evaluable(data)

    violations: List[AssumptionViolation] = []
    s0, t_melt = data.s0, params.t_melt

    if not 0.0 < s0 < params.length:
        violations.append(AssumptionViolation(
            assumption=ASSUMPTION_DOMAIN,
            detail=f"need 0 < s0 < L = {params.length}",
            value=s0,
        ))

    profile = data.profile
    if isinstance(profile, TabulatedProfile):
        violations.extend(_tabulated_shape(profile, s0))
        samples = np.asarray(profile.temp, dtype=float)
    else:
        samples = profile.sample(np.linspace(0.0, s0, 2), s0, t_melt)

    coldest = float(samples.min())
    if coldest < t_melt - settings.tol_bc:
        violations.append(AssumptionViolation(
            assumption=ASSUMPTION_TEMPERATURE,
            detail="T0(x) must stay at or above the melting temperature",
            value=coldest,
        ))

    t_interface = float(profile.sample(np.array([s0]), s0, t_melt)[0])
    if abs(t_interface - t_melt) > settings.tol_bc:
        violations.append(AssumptionViolation(
            assumption=ASSUMPTION_COMPATIBILITY,
            detail="T0(s0) must equal the melting temperature",
            value=t_interface,
        ))

    if data.v0 < 0.0:
        violations.append(AssumptionViolation(
            assumption=ASSUMPTION_VELOCITY,
            detail="initial interface velocity must be non-negative",
            value=data.v0,
        ))

    if order == 3:
        if data.a0 is None:
            violations.append(AssumptionViolation(
                assumption=ASSUMPTION_ACCELERATION,
                detail="third order needs an explicit initial acceleration a0",
            ))
        elif data.a0 < -data.v0 / params.epsilon1:
            violations.append(AssumptionViolation(
                assumption=ASSUMPTION_ACCELERATION,
                detail=f"need a0 >= -v0/epsilon1 = {-data.v0 / params.epsilon1}",
                value=data.a0,
            ))

    verdict = ValidationVerdict(ok=not violations, violations=violations)
    if not verdict.ok:
        logger.info(f"Initial data violates: {', '.join(verdict.names())}")
    return verdict


def _check_evaluable(data: InitialData) -> None:
    scalars = [data.s0, data.v0] + ([data.a0] if data.a0 is not None else [])
    if not np.all(np.isfinite(scalars)):
        raise ValidationError("NON_FINITE_INPUT", "Initial data contains non-finite values")
    profile = data.profile
    if isinstance(profile, TabulatedProfile):
        if len(profile.x) == 0:
            raise ValidationError("EMPTY_PROFILE", "Tabulated initial profile has no samples")
        if not (np.all(np.isfinite(profile.x)) and np.all(np.isfinite(profile.temp))):
            raise ValidationError("NON_FINITE_INPUT", "Initial profile contains non-finite values")
    elif not np.isfinite(profile.surplus):
        raise ValidationError("NON_FINITE_INPUT", "Initial profile surplus is not finite")


def _tabulated_shape(profile: TabulatedProfile, s0: float) -> List[AssumptionViolation]:
    x = np.asarray(profile.x, dtype=float)
    found = []
    if x.size > 1 and np.any(np.diff(x) <= 0.0):
        found.append(AssumptionViolation(
            assumption=PROFILE_ORDER,
            detail="profile positions must be strictly increasing",
        ))
    span_tol = 1e-12 * max(s0, 1.0)
    if abs(x[0]) > span_tol or abs(x[-1] - s0) > span_tol:
        found.append(AssumptionViolation(
            assumption=PROFILE_SPAN,
            detail=f"profile must span [0, s0] = [0, {s0}]",
            value=float(x[-1]),
        ))
    return found
