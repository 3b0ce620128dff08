# stefanctl/core/solver/stepper.py
import logging
import numpy as np
from scipy.linalg import solve_banded
from typing import Optional
from stefanctl.models.common import Scheme
from stefanctl.models.physical import PhysicalParams
from stefanctl.models.solver import SolverConfig
from stefanctl.models.state import SimState
from stefanctl.utils.exceptions import ConstraintViolation, NumericalError
from .interface import propagate
from .landau import boundary_flux_gradient, immobilized_coefficients

logger = logging.getLogger(__name__)

CFL_LIMIT = 0.5

# Implicitness of the supported schemes
THETA = {Scheme.CRANK_NICOLSON: 0.5, Scheme.EXPLICIT_EULER: 0.0}
BACKWARD_EULER = 1.0


def _operator_bands(a: float, advection: np.ndarray, h: float) -> np.ndarray:
    """Banded form of L U = a U_xixi + b(xi) U_xi on the unknowns U_0..U_{N-1}.

    Row 0 eliminates the ghost node with the Neumann data; its flux term is added
    separately. U_N = 0 is the Dirichlet node.
    """
    n = advection.size - 1
    b = advection[:n]
    upper = a / h ** 2 + b / (2.0 * h)
    lower = a / h ** 2 - b / (2.0 * h)
    upper[0] = 2.0 * a / h ** 2
    bands = np.zeros((3, n))
    bands[0, 1:] = upper[:-1]
    bands[1, :] = -2.0 * a / h ** 2
    bands[2, :-1] = lower[1:]
    return bands


def _apply_bands(bands: np.ndarray, U: np.ndarray) -> np.ndarray:
    result = bands[1] * U
    result[:-1] += bands[0, 1:] * U[1:]
    result[1:] += bands[2, :-1] * U[:-1]
    return result


def _theta_step(
    state: SimState,
    qc_start: float,
    qc_end: float,
    params: PhysicalParams,
    dt: float,
    theta: float,
    stencil: int,
) -> SimState:
    """One theta-weighted step of the coupled PDE and interface ODE.

    The PDE coefficients are frozen at t + theta dt using the interface propagated with
    the start-of-step forcing; the interface is then advanced exactly with the forcing
    -beta T_x(s) blended between the old and new temperature profiles.
    """
    beta, k = params.beta, params.k_cond
    Z = state.interface_vector()
    _, tx_start = boundary_flux_gradient(state, stencil)
    forcing_start = -beta * tx_start

    Z_frozen = propagate(Z, forcing_start, theta * dt, params) if theta > 0.0 else Z
    Z_end = propagate(Z, forcing_start, dt, params)
    if not (Z_frozen[0] > 0.0 and Z_end[0] > 0.0):
        raise ConstraintViolation(
            "INTERFACE_COLLAPSED",
            f"Predicted interface position left (0, L) during step at t={state.t}",
            time=state.t + dt,
        )

    h = state.dxi
    coeffs = immobilized_coefficients(state.xi_grid, Z_frozen[0], Z_frozen[1], params.alpha)
    a = coeffs.diffusion
    bands = _operator_bands(a, coeffs.advection, h)

    U = state.temp[:-1] - params.t_melt
    g_start = -state.s * qc_start / k
    g_end = -Z_end[0] * qc_end / k
    rhs = U + (1.0 - theta) * dt * _apply_bands(bands, U)
    rhs[0] -= dt * (2.0 * a / h) * ((1.0 - theta) * g_start + theta * g_end)

    if theta > 0.0:
        lhs = -theta * dt * bands
        lhs[1] += 1.0
        U_new = solve_banded((1, 1), lhs, rhs)
    else:
        U_new = rhs

    temp = np.append(U_new + params.t_melt, params.t_melt)
    trial = state.model_copy(update={"temp": temp, "s": float(Z_end[0]), "t": state.t + dt})
    _, tx_end = boundary_flux_gradient(trial, stencil)
    forcing = -beta * ((1.0 - theta) * tx_start + theta * tx_end)
    Z_new = propagate(Z, forcing, dt, params)

    new_state = SimState(
        t=state.t + dt,
        xi_grid=state.xi_grid,
        temp=temp,
        s=float(Z_new[0]),
        s_dot=float(Z_new[1]),
        s_ddot=float(Z_new[2]) if Z_new.size == 3 else None,
    )
    return new_state


def _check(state: SimState, params: PhysicalParams) -> SimState:
    scalars = state.interface_vector()
    if not (np.all(np.isfinite(state.temp)) and np.all(np.isfinite(scalars))):
        raise NumericalError("NON_FINITE_STATE", f"Non-finite state after step to t={state.t}")
    if not 0.0 < state.s < params.length:
        raise ConstraintViolation(
            "INTERFACE_OUT_OF_DOMAIN",
            f"Interface s={state.s} left (0, {params.length}) at t={state.t}",
            time=state.t,
        )
    return state


def step(
    state: SimState,
    qc: float,
    params: PhysicalParams,
    cfg: SolverConfig,
    qc_next: Optional[float] = None,
    dt: Optional[float] = None,
    startup: bool = False,
) -> SimState:
    """Advance one time step under boundary flux qc (at t) and qc_next (at t + dt).

    ``startup`` replaces a Crank-Nicolson step by two backward-Euler half steps, which
    damps the high-frequency error from an initial profile that does not match the
    boundary flux.
    """
    params.require_order(state.order)
    dt = cfg.dt if dt is None else dt
    qc_next = qc if qc_next is None else qc_next

    if cfg.scheme == Scheme.EXPLICIT_EULER:
        courant = params.alpha * dt * (state.nx / state.s) ** 2
        if courant > CFL_LIMIT:
            raise NumericalError(
                "CFL_VIOLATION",
                f"Explicit step unstable: alpha dt / dx^2 = {courant:.3g} > {CFL_LIMIT}",
            )

    if startup and cfg.scheme == Scheme.CRANK_NICOLSON:
        logger.debug(f"Backward-Euler startup step at t={state.t}")
        qc_mid = 0.5 * (qc + qc_next)
        half = _check(_theta_step(state, qc, qc_mid, params, 0.5 * dt, BACKWARD_EULER, cfg.flux_stencil), params)
        return _check(_theta_step(half, qc_mid, qc_next, params, 0.5 * dt, BACKWARD_EULER, cfg.flux_stencil), params)

    new_state = _theta_step(state, qc, qc_next, params, dt, THETA[cfg.scheme], cfg.flux_stencil)
    return _check(new_state, params)
