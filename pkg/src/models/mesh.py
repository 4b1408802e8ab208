from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from src.models.basis import AngularBasis
from src.models.moments import MomentVector

__all__ = ("ProfileNorm", "MeshState", "MassLedger", "StepDiagnostics", "Profile", "RunResult", "DIAGNOSTICS_HEADER")

DIAGNOSTICS_HEADER: Tuple[str, ...] = ("t", "mass", "outflow", "safeguard_count", "newton_iter_mean")


class ProfileNorm(str, Enum):
    L1 = "l1"
    LINF = "linf"


@dataclass(frozen=True, eq=False)
class MeshState:
    """Моменты по ячейкам, кэш множителей для тёплого старта и текущее время"""

    basis: AngularBasis
    dx: float
    moments: np.ndarray
    multipliers: np.ndarray
    time: float = 0.0

    @property
    def cells(self) -> List[MomentVector]:
        return [MomentVector(basis=self.basis, values=row) for row in self.moments]

    def total_mass(self) -> float:
        return float(self.moments[:, 0].sum() * self.dx)


@dataclass
class MassLedger:
    initial_mass: float
    boundary_outflow: float = 0.0
    boundary_inflow: float = 0.0
    source_input: float = 0.0
    absorbed: float = 0.0

    def expected_mass(self) -> float:
        return self.initial_mass + self.boundary_inflow + self.source_input - self.boundary_outflow - self.absorbed

    def discrepancy(self, mass: float) -> float:
        """Относительное расхождение текущей массы с балансом"""
        expected = self.expected_mass()
        return abs(mass - expected) / max(abs(expected), abs(mass), np.finfo(float).tiny)


@dataclass(frozen=True)
class StepDiagnostics:
    t: float
    mass: float
    outflow: float
    safeguard_count: int
    newton_iter_mean: float

    def as_record(self) -> Tuple[float, ...]:
        return (self.t, self.mass, self.outflow, self.safeguard_count, self.newton_iter_mean)


@dataclass(frozen=True, eq=False)
class Profile:
    """Профиль плотности u0 по центрам ячеек"""

    x: np.ndarray
    u0: np.ndarray
    model: str = ""

    @property
    def dx(self) -> float:
        if len(self.x) < 2:
            raise ValueError("Для шага сетки нужно хотя бы две ячейки.")
        return float(self.x[1] - self.x[0])


@dataclass
class RunResult:
    model: str
    state: MeshState
    ledger: MassLedger
    diagnostics: List[StepDiagnostics] = field(default_factory=list)
    x: Optional[np.ndarray] = None

    @property
    def safeguard_total(self) -> int:
        return sum(step.safeguard_count for step in self.diagnostics)

    @property
    def profile(self) -> Profile:
        return Profile(x=self.x, u0=self.state.moments[:, 0].copy(), model=self.model)
