# stefanctl/core/model/quadrature.py
"""Shared quadrature and difference stencils.

Every integral in the package goes through the composite trapezoid rule defined here and
every boundary derivative through the one-sided stencils below, so that the solver, the
control laws and the certificates see the same discrete quantities.
"""
import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid as _trapezoid
from stefanctl.utils.exceptions import NumericalError

# Forward one-sided first-derivative weights on a uniform grid (unit spacing)
FORWARD_WEIGHTS = {
    2: np.array([-3.0, 4.0, -1.0]) / 2.0,
    3: np.array([-11.0, 18.0, -9.0, 2.0]) / 6.0,
}


def trapezoid(values: np.ndarray, x: np.ndarray) -> float:
    return float(_trapezoid(values, x))


def tail_integrals(values: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Integral of ``values`` from each node x_i to the last node."""
    head = cumulative_trapezoid(values, x, initial=0.0)
    return head[-1] - head


def forward_difference(values: np.ndarray, h: float, stencil: int = 2) -> float:
    weights = _weights(values, stencil)
    return float(weights @ values[: weights.size]) / h


def backward_difference(values: np.ndarray, h: float, stencil: int = 2) -> float:
    weights = _weights(values, stencil)
    return -float(weights @ values[::-1][: weights.size]) / h


def grid_derivative(values: np.ndarray, h: float, stencil: int = 2) -> np.ndarray:
    """Central differences inside, one-sided stencils at both ends."""
    derivative = np.empty_like(values, dtype=float)
    derivative[1:-1] = (values[2:] - values[:-2]) / (2.0 * h)
    derivative[0] = forward_difference(values, h, stencil)
    derivative[-1] = backward_difference(values, h, stencil)
    return derivative


def _weights(values: np.ndarray, stencil: int) -> np.ndarray:
    if stencil not in FORWARD_WEIGHTS:
        raise NumericalError("BAD_STENCIL", f"Unsupported stencil order {stencil}")
    weights = FORWARD_WEIGHTS[stencil]
    if values.size < weights.size:
        raise NumericalError(
            "DEGENERATE_GRID",
            f"{values.size} nodes cannot support an order-{stencil} one-sided stencil",
        )
    return weights
