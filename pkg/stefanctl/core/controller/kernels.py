# stefanctl/core/controller/kernels.py
import numpy as np
from scipy import linalg
from stefanctl.models.gains import ControlGains, SystemMatrices
from stefanctl.models.physical import PhysicalParams


def system_matrices(params: PhysicalParams) -> SystemMatrices:
    """A, B of dX/dt = A X + B u_x(s, t) for the order the relaxation times describe."""
    if params.order == 2:
        eps = params.epsilon
        A = np.array([[0.0, 1.0], [0.0, -1.0 / eps]])
        B = np.array([0.0, -params.beta / eps])
    else:
        e1, e2 = params.epsilon1, params.epsilon2
        A = np.array([
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, -1.0 / (e1 * e2), -(1.0 / e1 + 1.0 / e2)],
        ])
        B = np.array([0.0, 0.0, -params.beta / (e1 * e2)])
    return SystemMatrices(A=A, B=B)


def closed_loop_matrix(gains: ControlGains, params: PhysicalParams) -> np.ndarray:
    matrices = system_matrices(params)
    return matrices.A + np.outer(matrices.B, gains.gain_vector(params))


def closed_loop_eigenvalues(gains: ControlGains, params: PhysicalParams) -> np.ndarray:
    return linalg.eigvals(closed_loop_matrix(gains, params))


def is_hurwitz(gains: ControlGains, params: PhysicalParams) -> bool:
    return bool(np.all(closed_loop_eigenvalues(gains, params).real < 0.0))


def characteristic_polynomial_2nd(gains: ControlGains, params: PhysicalParams) -> np.ndarray:
    """Coefficients of lambda^2 + (1/eps + c2) lambda + c1/eps."""
    eps = params.epsilon
    return np.array([1.0, 1.0 / eps + gains.c2, gains.c1 / eps])


def gain_input_product(gains: ControlGains, params: PhysicalParams) -> float:
    """K^T B; equals -c2 for second order and -c3 for third order."""
    return float(gains.gain_vector(params) @ system_matrices(params).B)


def kernel_phi(x, gains: ControlGains, params: PhysicalParams) -> np.ndarray:
    """phi(x) = K x; phi(0) = 0 and phi'(0) = K."""
    K = gains.gain_vector(params)
    return np.multiply.outer(np.asarray(x, dtype=float), K)


def kernel_k(x, gains: ControlGains, params: PhysicalParams):
    """k(x) = -(1/alpha) phi(x)^T B, in 1/m."""
    slope = -gain_input_product(gains, params) / params.alpha
    values = slope * np.asarray(x, dtype=float)
    return float(values) if values.ndim == 0 else values
