# stefanctl/models/solver.py
import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from typing import List, Literal, Optional
from .common import ControllerMode, FloatArray, Scheme


class SolverConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    nx: int = Field(128, ge=16, description="Cells on the normalized domain [0, 1]")
    dt: float = Field(0.25, gt=0, description="Time step [s]")
    t_final: float = Field(..., gt=0, description="Horizon [s]")
    scheme: Scheme = Scheme.CRANK_NICOLSON
    flux_stencil: Literal[2, 3] = 2
    startup_steps: int = Field(4, ge=0, description="Crank-Nicolson steps replaced by backward-Euler halves")


class QcSchedule(BaseModel):
    """Piecewise-linear open-loop heat flux [W/m^2]; held constant past the ends."""
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    times: List[float] = Field(default_factory=lambda: [0.0])
    values: List[float] = Field(default_factory=lambda: [0.0])

    def at(self, t: float) -> float:
        return float(np.interp(t, self.times, self.values))


class ControllerConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    mode: ControllerMode = ControllerMode.CLOSED_LOOP
    schedule: Optional[QcSchedule] = None
    flip_sign: bool = False


class ImmobilizedCoefficients(BaseModel):
    """Coefficients of u_t = diffusion * u_xixi + advection(xi) * u_xi on xi in [0, 1]."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    diffusion: float
    advection: FloatArray
    flux_scale: float = Field(..., description="s(t): u_xi(0) = -flux_scale * qc / k")
