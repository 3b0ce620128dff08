# stefanctl/core/controller/gains.py
import logging
import math
from typing import List, Optional
from stefanctl.config.settings import settings
from stefanctl.core.model.setpoint import min_setpoint_2nd, min_setpoint_3rd, surplus_energy
from stefanctl.models.common import CheckStatus, SetpointRelaxation
from stefanctl.models.gains import ControlGains
from stefanctl.models.physical import InitialData, PhysicalParams
from stefanctl.models.reports import GainCheck2nd, GainCheck3rd, Inequality
from stefanctl.utils.exceptions import ValidationError
from .kernels import closed_loop_eigenvalues

logger = logging.getLogger(__name__)

BRANCH_DIFFUSIVE = "12sr2_le_alpha_eps"
BRANCH_SETPOINT = "12sr2_gt_alpha_eps"

DIMENSION_NOTE = (
    "c2_barbar second argument (alpha eps c1 + alpha)/(12 s_r^2 - alpha eps) is evaluated "
    "verbatim; its numerator mixes units of m^2 and m^2/s, so its value depends on the unit system"
)


def _compare(lhs: float, rhs: float, strict: bool) -> Inequality:
    """Check lhs < rhs (strict) or lhs <= rhs; ties within the relative margin are
    reported as boundary for strict checks and as satisfied otherwise."""
    if math.isinf(rhs) and rhs > 0:
        return Inequality(status=CheckStatus.SATISFIED, margin=math.inf, bound=rhs)
    margin = rhs - lhs
    scale = max(abs(lhs), abs(rhs), 1e-300)
    if abs(margin) <= settings.gain_margin_rel * scale:
        status = CheckStatus.BOUNDARY if strict else CheckStatus.SATISFIED
    elif margin > 0:
        status = CheckStatus.SATISFIED
    else:
        status = CheckStatus.VIOLATED
    return Inequality(status=status, margin=margin, bound=rhs)


def _combine(parts: List[Inequality], bound: Optional[float] = None) -> Inequality:
    statuses = [p.status for p in parts]
    if CheckStatus.VIOLATED in statuses:
        status = CheckStatus.VIOLATED
    elif CheckStatus.BOUNDARY in statuses:
        status = CheckStatus.BOUNDARY
    else:
        status = CheckStatus.SATISFIED
    return Inequality(status=status, margin=min(p.margin for p in parts), bound=bound)


def _positive(value: float) -> Inequality:
    return _compare(0.0, value, strict=True)


def _ratio(numerator: float, denominator: float) -> float:
    if denominator == 0.0:
        return math.inf
    return numerator / denominator


def check_gains_2nd(gains: ControlGains, data: InitialData, params: PhysicalParams) -> GainCheck2nd:
    """Safety condition c1 <= c2 < c1 (1 + (s_r - s_min)/(s_min - s0)) and the stability
    condition with the branch selected by 12 s_r^2 <= alpha eps. Verdicts are independent."""
    params.require_order(2)
    s_min = min_setpoint_2nd(data, params)
    setpoint = _compare(s_min, gains.s_r, strict=True)
    eigen = closed_loop_eigenvalues(gains, params).real.tolist()
    report = GainCheck2nd(
        min_setpoint=s_min,
        setpoint=setpoint,
        assumption3_ok=setpoint.ok,
        hurwitz_ok=all(e < 0 for e in eigen),
        closed_loop_eigenvalues=eigen,
    )
    if not setpoint.ok:
        report.notes.append("setpoint not above the minimum setpoint; gain bounds not computed")
        logger.warning(f"Setpoint {gains.s_r} is not above the minimum setpoint {s_min}")
        return report

    c1, c2 = gains.c1, gains.c2
    c2_bar = c1 * _ratio(gains.s_r - s_min, s_min - data.s0)
    safety_bound = c1 + c2_bar
    assumption4 = _combine(
        [_compare(c1, c2, strict=False), _compare(c2, safety_bound, strict=True)],
        bound=safety_bound,
    )

    alpha_eps = params.alpha * params.epsilon
    twelve_sr2 = 12.0 * gains.s_r ** 2
    if twelve_sr2 <= alpha_eps:
        branch, c2_barbar, stability_bound = BRANCH_DIFFUSIVE, None, c1 + c2_bar
    else:
        branch = BRANCH_SETPOINT
        c2_barbar = min(c2_bar, (alpha_eps * c1 + params.alpha) / (twelve_sr2 - alpha_eps))
        stability_bound = c1 + c2_barbar
        report.notes.append(DIMENSION_NOTE)
    theorem = _combine(
        [_positive(c1), _compare(c1, c2, strict=False), _compare(c2, stability_bound, strict=True)],
        bound=stability_bound,
    )

    report = report.model_copy(update=dict(
        assumption4=assumption4,
        assumption4_ok=assumption4.ok and c1 > 0,
        c2_safety_bound=safety_bound,
        branch=branch,
        c2_bar=c2_bar,
        c2_barbar=c2_barbar,
        theorem=theorem,
        theorem_cond_ok=theorem.ok,
    ))
    if not report.assumption4_ok:
        logger.warning(f"Gains (c1={c1}, c2={c2}) violate the safety gain condition")
    return report


def check_gains_3rd(
    gains: ControlGains,
    data: InitialData,
    params: PhysicalParams,
    relaxation: SetpointRelaxation = SetpointRelaxation.EPSILON1,
) -> GainCheck3rd:
    """Assumptions on (c1, c2), the third-order setpoint bound and the c3 window."""
    params.require_order(3)
    if data.a0 is None:
        raise ValidationError("MISSING_ACCELERATION", "Third-order gain checks need a0")
    if gains.c3 is None:
        raise ValidationError("MISSING_GAIN", "Third-order gain checks need c3")

    c1, c2, c3 = gains.c1, gains.c2, gains.c3
    e1, e2 = params.epsilon1, params.epsilon2
    assumption6 = _combine([_positive(c1), _compare(c1, c2, strict=False)])
    eigen = closed_loop_eigenvalues(gains, params).real.tolist()
    report = GainCheck3rd(
        assumption6=assumption6,
        assumption6_ok=assumption6.ok,
        setpoint_relaxation=relaxation,
        hurwitz_ok=all(e < 0 for e in eigen),
        closed_loop_eigenvalues=eigen,
    )
    report.notes.append(
        f"setpoint bound uses {relaxation.value} as its single relaxation time (configurable)"
    )
    if not assumption6.ok:
        logger.warning(f"Gains (c1={c1}, c2={c2}) violate 0 < c1 <= c2")
        return report

    s_min = min_setpoint_3rd(data, params, c1, c2, relaxation)
    setpoint = _compare(s_min, gains.s_r, strict=True)

    denominator = e1 * e2 * data.a0 + surplus_energy(data, params)
    c3_bar = _ratio(c1 * (gains.s_r - s_min), denominator)
    if denominator < 0.0:
        report.notes.append("c3_bar denominator is negative; window evaluated verbatim")
    terms = {
        "epsilon_ratio_gap": e1 / e2 * (c2 - c1),
        "c3_bar": c3_bar,
        "epsilon_ratio_c2": e2 / e1 * c2,
    }
    c3_lower = _compare(c2, c3, strict=False)
    c3_upper = _compare(c3, c2 + min(terms.values()), strict=False)

    return report.model_copy(update=dict(
        min_setpoint=s_min,
        setpoint=setpoint,
        assumption7_ok=setpoint.ok,
        c3_bar=c3_bar,
        c3_bar_unbounded=math.isinf(c3_bar),
        c3_upper_terms=terms,
        c3_lower=c3_lower,
        c3_upper=c3_upper,
        assumption8_ok=c3_lower.ok and c3_upper.ok,
    ))
