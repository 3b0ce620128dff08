# stefanctl/models/trajectory.py
import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field
from typing import Dict, Optional
from .common import BoolArray, ControllerMode, FloatArray


class Termination(BaseModel):
    error_code: str
    message: str
    time: float


class Trajectory(BaseModel):
    """Time-indexed record channels of one simulation.

    Scalar channels are stored at every step. Temperature snapshots are decimated;
    ``snapshot_s`` holds the interface position of each snapshot so that the normalized
    samples can be mapped back to x.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    order: int
    mode: ControllerMode
    dt: float
    t: FloatArray
    s: FloatArray
    s_dot: FloatArray
    s_ddot: Optional[FloatArray] = None
    qc: FloatArray
    T_boundary: FloatArray
    V: FloatArray
    Phi: FloatArray

    # diagnostic channels
    tx_interface: FloatArray
    min_temp: FloatArray
    energy: FloatArray
    w_end: FloatArray
    wx_origin: FloatArray
    u_max: FloatArray

    flags: Dict[str, BoolArray] = Field(default_factory=dict)

    snapshot_t: FloatArray
    snapshot_s: FloatArray
    snapshot_temp: FloatArray
    xi_grid: FloatArray

    termination: Optional[Termination] = None

    def __len__(self) -> int:
        return self.t.size

    def uniform_length(self) -> int:
        """Number of leading records spaced exactly dt apart (drops a final partial step)."""
        n = self.t.size
        if n >= 2 and not np.isclose(self.t[-1] - self.t[-2], self.dt, rtol=1e-9, atol=0.0):
            n -= 1
        return n

    @property
    def completed(self) -> bool:
        return self.termination is None

    def with_flags(self, flags: Dict[str, np.ndarray]) -> "Trajectory":
        return self.model_copy(update={"flags": {k: np.asarray(v, dtype=bool) for k, v in flags.items()}})

    def to_frame(self) -> pd.DataFrame:
        """Fixed CSV layout: t, s, s_dot[, s_ddot], qc, T_boundary, V, Phi, then flags."""
        columns: Dict[str, np.ndarray] = {"t": self.t, "s": self.s, "s_dot": self.s_dot}
        if self.s_ddot is not None:
            columns["s_ddot"] = self.s_ddot
        columns.update({"qc": self.qc, "T_boundary": self.T_boundary, "V": self.V, "Phi": self.Phi})
        for name in sorted(self.flags):
            columns[name] = self.flags[name].astype(int)
        return pd.DataFrame(columns)
