# stefanctl/core/analysis/__init__.py
from .transform import backstepping_transform, target_boundary_residuals
from .lyapunov import (
    solve_P,
    lambda_certificate,
    certify,
    lyapunov_values,
    lyapunov_decay,
)
from .safety import constraint_margins, safety_monitor
from .cbf import cbf_chain, cbf_residual
from .energy import stored_energy, energy_balance
from .convergence import observed_order, richardson_extrapolate

__all__ = [
    "backstepping_transform",
    "target_boundary_residuals",
    "solve_P",
    "lambda_certificate",
    "certify",
    "lyapunov_values",
    "lyapunov_decay",
    "constraint_margins",
    "safety_monitor",
    "cbf_chain",
    "cbf_residual",
    "stored_energy",
    "energy_balance",
    "observed_order",
    "richardson_extrapolate",
]
