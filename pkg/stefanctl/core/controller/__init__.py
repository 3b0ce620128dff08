# stefanctl/core/controller/__init__.py
from .kernels import (
    system_matrices,
    closed_loop_matrix,
    closed_loop_eigenvalues,
    is_hurwitz,
    characteristic_polynomial_2nd,
    gain_input_product,
    kernel_phi,
    kernel_k,
)
from .laws import control_2nd, control_3rd, control_law
from .gains import check_gains_2nd, check_gains_3rd
from .flux_ode import qc_ode_residual

__all__ = [
    "system_matrices",
    "closed_loop_matrix",
    "closed_loop_eigenvalues",
    "is_hurwitz",
    "characteristic_polynomial_2nd",
    "gain_input_product",
    "kernel_phi",
    "kernel_k",
    "control_2nd",
    "control_3rd",
    "control_law",
    "check_gains_2nd",
    "check_gains_3rd",
    "qc_ode_residual",
]
