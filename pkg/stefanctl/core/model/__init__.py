# stefanctl/core/model/__init__.py
from .quadrature import trapezoid, tail_integrals, grid_derivative
from .setpoint import min_setpoint_2nd, min_setpoint_3rd, surplus_energy
from .validation import validate_initial

__all__ = [
    "trapezoid",
    "tail_integrals",
    "grid_derivative",
    "min_setpoint_2nd",
    "min_setpoint_3rd",
    "surplus_energy",
    "validate_initial",
]

from .states import initial_state, reference_error

__all__ += ["initial_state", "reference_error"]
