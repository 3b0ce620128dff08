# stefanctl/core/solver/interface.py
import numpy as np
from functools import lru_cache
from scipy.linalg import expm
from typing import Tuple
from stefanctl.models.physical import PhysicalParams


def interface_matrices(relaxations: Tuple[float, ...]) -> Tuple[np.ndarray, np.ndarray]:
    """dZ/dt = A Z + b f for Z = (s, sdot[, sddot]) driven by f = -beta T_x(s)."""
    if len(relaxations) == 1:
        eps = relaxations[0]
        return np.array([[0.0, 1.0], [0.0, -1.0 / eps]]), np.array([0.0, 1.0 / eps])
    e1, e2 = relaxations
    A = np.array([
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, -1.0 / (e1 * e2), -(1.0 / e1 + 1.0 / e2)],
    ])
    return A, np.array([0.0, 0.0, 1.0 / (e1 * e2)])


@lru_cache(maxsize=64)
def _propagator(relaxations: Tuple[float, ...], dt: float) -> Tuple[np.ndarray, np.ndarray]:
    # exp of the augmented matrix [[A, b], [0, 0]] integrates constant forcing exactly
    A, b = interface_matrices(relaxations)
    n = b.size
    augmented = np.zeros((n + 1, n + 1))
    augmented[:n, :n] = A
    augmented[:n, n] = b
    flow = expm(augmented * dt)
    transition, response = flow[:n, :n].copy(), flow[:n, n].copy()
    transition.setflags(write=False)
    response.setflags(write=False)
    return transition, response


def propagate(Z: np.ndarray, forcing: float, dt: float, params: PhysicalParams) -> np.ndarray:
    """Advance the interface state over dt with the forcing held constant."""
    transition, response = _propagator(tuple(float(e) for e in params.relaxations), float(dt))
    return transition @ np.asarray(Z, dtype=float) + response * forcing
