# stefanctl/models/common.py
import numpy as np
from enum import Enum
from pydantic import BaseModel, BeforeValidator, PlainSerializer
from typing import Annotated, Optional


def _readonly_array(value) -> np.ndarray:
    array = np.array(value, dtype=float)
    array.setflags(write=False)
    return array


# Immutable float64 array; serialized as a plain list
FloatArray = Annotated[
    np.ndarray,
    BeforeValidator(_readonly_array),
    PlainSerializer(lambda a: a.tolist(), return_type=list),
]


class Scheme(str, Enum):
    CRANK_NICOLSON = "crank_nicolson"
    EXPLICIT_EULER = "explicit_euler"


class ControllerMode(str, Enum):
    CLOSED_LOOP = "closed_loop"
    OPEN_LOOP = "open_loop"


class UnitSystem(str, Enum):
    SI = "si"
    CM = "cm"


class SetpointRelaxation(str, Enum):
    """Relaxation time used inside the third-order setpoint bound"""
    EPSILON1 = "epsilon1"
    EPSILON2 = "epsilon2"
    SUM = "sum"


class CheckStatus(str, Enum):
    SATISFIED = "satisfied"
    BOUNDARY = "boundary"
    VIOLATED = "violated"
    NOT_APPLICABLE = "not_applicable"


class ErrorReport(BaseModel):
    error_code: str
    message: str
    debug_info: Optional[str] = None


def _readonly_bool_array(value) -> np.ndarray:
    array = np.array(value, dtype=bool)
    array.setflags(write=False)
    return array


BoolArray = Annotated[
    np.ndarray,
    BeforeValidator(_readonly_bool_array),
    PlainSerializer(lambda a: a.tolist(), return_type=list),
]
