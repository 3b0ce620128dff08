# stefanctl/models/state.py
import numpy as np
from pydantic import BaseModel, ConfigDict
from typing import Optional
from .common import FloatArray


class SimState(BaseModel):
    """Temperature on the normalized grid xi = x/s(t) plus the interface state.

    ``temp[-1]`` is the melting temperature exactly. ``s_ddot`` is carried only by
    third-order runs.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    t: float
    xi_grid: FloatArray
    temp: FloatArray
    s: float
    s_dot: float
    s_ddot: Optional[float] = None

    @property
    def nx(self) -> int:
        return self.xi_grid.size - 1

    @property
    def dxi(self) -> float:
        return 1.0 / self.nx

    @property
    def x(self) -> np.ndarray:
        """Physical coordinates of the grid nodes [m]"""
        return self.xi_grid * self.s

    @property
    def order(self) -> int:
        return 2 if self.s_ddot is None else 3

    def interface_vector(self) -> np.ndarray:
        if self.s_ddot is None:
            return np.array([self.s, self.s_dot])
        return np.array([self.s, self.s_dot, self.s_ddot])


class ReferenceErrorState(BaseModel):
    """u = T - Tm on the grid and X = (s - s_r, sdot[, sddot])."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    x: FloatArray
    u: FloatArray
    X: FloatArray
