from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from src.models.basis import AngularBasis, Quadrature
from src.models.moments import MomentVector

__all__ = ("Multipliers", "SolverOptions", "ClosureSolution", "ClosureBatch")


@dataclass(frozen=True, eq=False)
class Multipliers:
    """Множители Лагранжа α двойственной задачи"""

    alpha: np.ndarray

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=float)
        if not np.all(np.isfinite(alpha)):
            raise ValueError("Множители должны быть конечными.")
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def of(cls, values: Union[Sequence[float], np.ndarray]) -> "Multipliers":
        return cls(alpha=np.asarray(values, dtype=float))


@dataclass(frozen=True, eq=False)
class SolverOptions:
    gradient_tol: float
    max_iterations: int
    quadrature: Quadrature
    regularization_ladder: Tuple[float, ...]
    armijo_c: float = 1e-4
    min_step: float = 2.0 ** -30

    def __post_init__(self):
        if not self.gradient_tol > 0:
            raise ValueError("gradient_tol должен быть положительным.")
        if not self.regularization_ladder:
            raise ValueError("Лестница регуляризации не может быть пустой.")


@dataclass(frozen=True, eq=False)
class ClosureSolution:
    """Решение двойственной задачи и все производные величины анзаца"""

    alpha: Multipliers
    u_reproduced: MomentVector
    flux_moments: np.ndarray
    flux_plus: np.ndarray
    flux_minus: np.ndarray
    half_densities: Tuple[float, float]
    half_first: Tuple[float, float]
    junction: float
    residual_norm: float = 0.0
    iterations: int = 0
    regularization_used: float = 0.0


@dataclass(frozen=True, eq=False)
class ClosureBatch:
    """Те же величины, что и в ClosureSolution, для набора ячеек (первая ось)"""

    basis: AngularBasis
    alpha: np.ndarray
    moments: np.ndarray
    flux_plus: np.ndarray
    flux_minus: np.ndarray
    half_densities: np.ndarray
    half_first: np.ndarray
    junction: np.ndarray
    residual: np.ndarray
    iterations: np.ndarray
    regularization: np.ndarray
    converged: np.ndarray

    def __len__(self) -> int:
        return len(self.alpha)

    @property
    def flux_moments(self) -> np.ndarray:
        return self.flux_plus + self.flux_minus

    def __getitem__(self, index: int) -> ClosureSolution:
        if not self.converged[index]:
            raise IndexError(f"Замыкание в ячейке {index} не сошлось.")
        return ClosureSolution(
            alpha=Multipliers.of(self.alpha[index]),
            u_reproduced=MomentVector(basis=self.basis, values=self.moments[index]),
            flux_moments=self.flux_plus[index] + self.flux_minus[index],
            flux_plus=self.flux_plus[index].copy(),
            flux_minus=self.flux_minus[index].copy(),
            half_densities=(float(self.half_densities[index, 0]), float(self.half_densities[index, 1])),
            half_first=(float(self.half_first[index, 0]), float(self.half_first[index, 1])),
            junction=float(self.junction[index]),
            residual_norm=float(self.residual[index]),
            iterations=int(self.iterations[index]),
            regularization_used=float(self.regularization[index]),
        )
