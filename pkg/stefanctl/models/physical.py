# stefanctl/models/physical.py
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.integrate import trapezoid
from typing import Annotated, List, Literal, Optional, Tuple, Union
from stefanctl.utils.exceptions import ValidationError


class PhysicalParams(BaseModel):
    """Thermophysical constants (SI) plus relaxation times of the interface dynamics.

    Exactly one of ``epsilon`` (second order) or the pair ``epsilon1``/``epsilon2``
    (third order) must be given.
    """
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    alpha: float = Field(..., gt=0, description="Thermal diffusivity [m^2/s]")
    beta: float = Field(..., gt=0, description="Interface response coefficient [m^2/(s K)]")
    k_cond: float = Field(..., gt=0, description="Thermal conductivity [W/(m K)]")
    t_melt: float = Field(..., description="Melting temperature [K]")
    length: float = Field(..., gt=0, description="Material length [m]")
    epsilon: Optional[float] = Field(None, gt=0, description="Relaxation time [s]")
    epsilon1: Optional[float] = Field(None, gt=0, description="First relaxation time [s]")
    epsilon2: Optional[float] = Field(None, gt=0, description="Second relaxation time [s]")

    @model_validator(mode="after")
    def _check_relaxations(self):
        pair = (self.epsilon1, self.epsilon2)
        if self.epsilon is not None and any(e is not None for e in pair):
            raise ValueError("give either epsilon or (epsilon1, epsilon2), not both")
        if self.epsilon is None and any(e is None for e in pair):
            raise ValueError("second order needs epsilon, third order needs epsilon1 and epsilon2")
        return self

    @property
    def order(self) -> int:
        return 2 if self.epsilon is not None else 3

    @property
    def relaxations(self) -> Tuple[float, ...]:
        if self.order == 2:
            return (self.epsilon,)
        return (self.epsilon1, self.epsilon2)

    def require_order(self, order: int) -> None:
        if order not in (2, 3):
            raise ValidationError("BAD_ORDER", f"Interface order must be 2 or 3, got {order}")
        if order != self.order:
            raise ValidationError(
                "ORDER_MISMATCH",
                f"Order {order} requested but the relaxation times describe order {self.order}",
            )


class LinearProfile(BaseModel):
    """T0(x) = Tm + surplus * (1 - x/s0), kept parametric so its integral is exact."""
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    kind: Literal["linear"] = "linear"
    surplus: float = Field(..., description="Surplus temperature at x = 0 [K]")

    def sample(self, x: np.ndarray, s0: float, t_melt: float) -> np.ndarray:
        return t_melt + self.surplus * (1.0 - np.asarray(x, dtype=float) / s0)

    def surplus_integral(self, s0: float, t_melt: float) -> float:
        return 0.5 * self.surplus * s0

    def endpoints(self, s0: float) -> Tuple[float, float]:
        return 0.0, s0


class TabulatedProfile(BaseModel):
    """Absolute temperatures sampled at increasing positions, linearly interpolated."""
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    kind: Literal["tabulated"] = "tabulated"
    x: List[float] = Field(..., description="Sample positions [m]")
    temp: List[float] = Field(..., description="Temperatures [K]")

    @model_validator(mode="after")
    def _check_lengths(self):
        if len(self.x) != len(self.temp):
            raise ValueError("x and temp must have the same length")
        return self

    def sample(self, x: np.ndarray, s0: float, t_melt: float) -> np.ndarray:
        return np.interp(np.asarray(x, dtype=float), self.x, self.temp)

    def surplus_integral(self, s0: float, t_melt: float) -> float:
        return float(trapezoid(np.asarray(self.temp) - t_melt, np.asarray(self.x)))

    def endpoints(self, s0: float) -> Tuple[float, float]:
        return self.x[0], self.x[-1]

    @classmethod
    def from_linear(cls, profile: LinearProfile, s0: float, t_melt: float, samples: int = 64):
        x = np.linspace(0.0, s0, samples)
        return cls(x=x.tolist(), temp=profile.sample(x, s0, t_melt).tolist())


InitialProfile = Annotated[Union[LinearProfile, TabulatedProfile], Field(discriminator="kind")]


class InitialData(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    s0: float = Field(..., description="Initial interface position [m]")
    v0: float = Field(0.0, description="Initial interface velocity [m/s]")
    a0: Optional[float] = Field(None, description="Initial interface acceleration [m/s^2], third order")
    profile: InitialProfile
