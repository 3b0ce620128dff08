# stefanctl/core/solver/__init__.py
from .landau import transform_pde, boundary_flux_gradient
from .interface import propagate
from .stepper import step
from .simulate import simulate, time_steps, snapshot_stride

__all__ = [
    "transform_pde",
    "boundary_flux_gradient",
    "propagate",
    "step",
    "simulate",
    "time_steps",
    "snapshot_stride",
]
