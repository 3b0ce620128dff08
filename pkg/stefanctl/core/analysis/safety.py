# stefanctl/core/analysis/safety.py
import logging
import numpy as np
from typing import Dict, Optional
from stefanctl.config.settings import settings
from stefanctl.models.gains import ControlGains
from stefanctl.models.physical import InitialData, PhysicalParams
from stefanctl.models.reports import ConstraintVerdict, SafetyReport
from stefanctl.models.trajectory import Trajectory

logger = logging.getLogger(__name__)

# Conclusions that qc >= 0 must imply
IMPLIED = ("sdot_nonneg", "s_bounds", "temp_valid")


def constraint_margins(
    trajectory: Trajectory,
    data: InitialData,
    params: PhysicalParams,
    s_r: Optional[float] = None,
) -> Dict[str, np.ndarray]:
    """Signed margin per record for every monitored constraint; >= 0 is safe.

    The upper interface bound s <= s_r applies only when a setpoint is known.
    """
    t, s, s_dot, qc = trajectory.t, trajectory.s, trajectory.s_dot, trajectory.qc
    qc_scale = float(np.max(np.abs(qc))) if qc.size else 0.0

    lower = s - (data.s0 - settings.tol_pos)
    if s_r is None:
        bounds = lower
    else:
        bounds = np.minimum(lower, (s_r + settings.tol_pos) - s)

    margins = {
        "temp_valid": trajectory.min_temp - (params.t_melt - settings.tol_temp),
        "interface_valid": np.minimum(s, params.length - s),
        "tx_nonpos": settings.tol_grad - trajectory.tx_interface,
        "qc_nonneg": qc + settings.tol_qc_rel * qc_scale,
        "sdot_nonneg": s_dot + settings.tol_mono,
        "s_bounds": bounds,
    }
    if trajectory.order == 3:
        margins["h2_nonneg"] = params.epsilon1 * trajectory.s_ddot + s_dot + settings.tol_mono
    else:
        margins["gronwall"] = s_dot - data.v0 * np.exp(-t / params.epsilon) + settings.tol_mono
    return margins


def _verdict(name: str, margin: np.ndarray, t: np.ndarray) -> ConstraintVerdict:
    broken = np.flatnonzero(margin < 0.0)
    return ConstraintVerdict(
        name=name,
        satisfied=broken.size == 0,
        worst_margin=float(margin.min()) if margin.size else None,
        first_violation_time=float(t[broken[0]]) if broken.size else None,
    )


def safety_monitor(
    trajectory: Trajectory,
    data: InitialData,
    params: PhysicalParams,
    gains: Optional[ControlGains] = None,
) -> SafetyReport:
    """Evaluate every monitored constraint over the records. Without gains the upper
    interface bound is skipped."""
    margins = constraint_margins(trajectory, data, params, gains.s_r if gains is not None else None)
    t = trajectory.t
    gronwall = margins.pop("gronwall", None)
    constraints = {name: _verdict(name, margin, t) for name, margin in margins.items()}

    if gronwall is None:
        gronwall_verdict = ConstraintVerdict(name="gronwall", applicable=False, satisfied=True)
    else:
        gronwall_verdict = _verdict("gronwall", gronwall, t)

    implication = (not constraints["qc_nonneg"].satisfied) or all(constraints[n].satisfied for n in IMPLIED)
    report = SafetyReport(
        constraints=constraints,
        gronwall=gronwall_verdict,
        implication_holds=implication,
        all_satisfied=all(c.satisfied for c in constraints.values()) and gronwall_verdict.satisfied,
    )
    if not report.all_satisfied:
        logger.warning(f"Safety constraints violated: {report.violated()}")
    if not implication:
        logger.warning("qc stayed nonnegative but a safety conclusion failed")
    return report
