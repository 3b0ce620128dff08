# stefanctl/core/solver/landau.py
"""Front fixing (Landau) transform of the liquid phase onto xi = x/s(t) in [0, 1].

With U(xi, t) = T(xi s(t), t) - Tm the heat equation becomes

    U_t = (alpha / s^2) U_xixi + (xi sdot / s) U_xi

with U_xi(0) = -s qc / k at the heated boundary and U(1) = 0 at the interface.
"""
from typing import Tuple
from stefanctl.core.model.quadrature import backward_difference, forward_difference
from stefanctl.models.physical import PhysicalParams
from stefanctl.models.solver import ImmobilizedCoefficients
from stefanctl.models.state import SimState
from stefanctl.utils.exceptions import ConstraintViolation


def immobilized_coefficients(xi, s: float, s_dot: float, alpha: float) -> ImmobilizedCoefficients:
    return ImmobilizedCoefficients(diffusion=alpha / s ** 2, advection=xi * s_dot / s, flux_scale=s)


def transform_pde(state: SimState, params: PhysicalParams) -> ImmobilizedCoefficients:
    if not state.s > 0.0:
        raise ConstraintViolation(
            "INTERFACE_COLLAPSED", f"Interface position {state.s} is not positive", time=state.t
        )
    return immobilized_coefficients(state.xi_grid, state.s, state.s_dot, params.alpha)


def boundary_flux_gradient(state: SimState, stencil: int = 2) -> Tuple[float, float]:
    """One-sided T_x at x = 0 and at the interface [K/m]."""
    tx_origin = forward_difference(state.temp, state.dxi, stencil) / state.s
    tx_interface = backward_difference(state.temp, state.dxi, stencil) / state.s
    return tx_origin, tx_interface
