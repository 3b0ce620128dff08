# stefanctl/core/analysis/convergence.py
import math
from typing import Optional, Sequence


def observed_order(values: Sequence[float], ratio: float = 2.0) -> Optional[float]:
    """Richardson estimate log(|v0 - v1| / |v1 - v2|) / log(ratio) from the last three
    values of a refinement sequence (coarse to fine). None when it is undefined."""
    if len(values) < 3 or ratio <= 1.0:
        return None
    coarse, medium, fine = values[-3:]
    coarse_gap, fine_gap = abs(coarse - medium), abs(medium - fine)
    if fine_gap == 0.0 or coarse_gap == 0.0 or not math.isfinite(coarse_gap / fine_gap):
        return None
    return math.log(coarse_gap / fine_gap) / math.log(ratio)


def richardson_extrapolate(values: Sequence[float], order: float, ratio: float = 2.0) -> float:
    """Extrapolated limit of the two finest values for a known order."""
    medium, fine = values[-2:]
    factor = ratio ** order
    return fine + (fine - medium) / (factor - 1.0)
