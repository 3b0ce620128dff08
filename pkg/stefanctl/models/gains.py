# stefanctl/models/gains.py
import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from typing import Optional
from .common import FloatArray
from .physical import PhysicalParams
from stefanctl.utils.exceptions import ValidationError


class ControlGains(BaseModel):
    """Gains (c1, c2[, c3]) in 1/s and the setpoint s_r in m.

    The gain vector K is derived from the gains, the relaxation times and beta; it is
    never stored.
    """
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    c1: float = Field(..., gt=0, description="Position gain [1/s]")
    c2: float = Field(..., description="Velocity gain [1/s]")
    c3: Optional[float] = Field(None, description="Acceleration gain [1/s], third order")
    s_r: float = Field(..., gt=0, description="Interface setpoint [m]")

    def gain_vector(self, params: PhysicalParams) -> np.ndarray:
        if params.order == 2:
            return np.array([self.c1, params.epsilon * self.c2]) / params.beta
        if self.c3 is None:
            raise ValidationError("MISSING_GAIN", "Third-order control needs c3")
        e1, e2 = params.epsilon1, params.epsilon2
        return np.array([self.c1, (e1 + e2) * self.c2, e1 * e2 * self.c3]) / params.beta


class SystemMatrices(BaseModel):
    """A and B of the reference-error interface ODE  dX/dt = A X + B u_x(s, t)."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    A: FloatArray
    B: FloatArray

    @property
    def order(self) -> int:
        return self.B.size
