from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

__all__ = ("EigenResult", "ScanMode", "ScanRow", "ScanTable", "SCAN_HEADER")

SCAN_HEADER: Tuple[str, ...] = (
    "phi2p", "phi2m", "phi1", "lam1", "lam2", "lam3", "lam4", "min_gap", "max_gap", "reg",
)


@dataclass(frozen=True, eq=False)
class EigenResult:
    eigenvalues: np.ndarray
    max_imag_residual: float
    min_adjacent_gap: float
    max_adjacent_gap: float


class ScanMode(str, Enum):
    MEAN_CUT = "mean"
    BOUNDARY = "boundary"


@dataclass(frozen=True, eq=False)
class ScanRow:
    """Строка скана; source - точка до регуляризации"""

    phi2p: float
    phi2m: float
    phi1: float
    eigen: Optional[EigenResult]
    regularization: float
    source: Tuple[float, float, float]

    @property
    def failed(self) -> bool:
        return self.eigen is None

    def as_record(self) -> Tuple[float, ...]:
        if self.eigen is None:
            nan = float("nan")
            return (self.phi2p, self.phi2m, self.phi1) + (nan,) * 6 + (nan,)
        return (
            (self.phi2p, self.phi2m, self.phi1)
            + tuple(float(v) for v in self.eigen.eigenvalues)
            + (self.eigen.min_adjacent_gap, self.eigen.max_adjacent_gap, self.regularization)
        )


@dataclass
class ScanTable:
    mode: ScanMode
    resolution: int
    regularization: float
    rows: List[ScanRow] = field(default_factory=list)

    def records(self) -> List[Tuple[float, ...]]:
        return [row.as_record() for row in self.rows]
