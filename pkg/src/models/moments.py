from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from src.models.basis import AngularBasis

__all__ = ("MomentVector", "NormalizedMoments", "RealizabilityVerdict", "DiracPair")


def _frozen_array(values: Union[Sequence[float], np.ndarray]) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class MomentVector:
    """Вектор моментов u, привязанный к базису"""

    basis: AngularBasis
    values: np.ndarray

    def __post_init__(self):
        values = _frozen_array(self.values)
        if values.shape != (self.basis.n,):
            raise ValueError(f"Ожидалось {self.basis.n} моментов, получено {values.shape}.")
        object.__setattr__(self, "values", values)

    @property
    def density(self) -> float:
        return float(self.values[0])

    def normalized(self) -> "NormalizedMoments":
        return NormalizedMoments(basis=self.basis, values=self.values[1:] / self.values[0])

    def scaled(self, factor: float) -> "MomentVector":
        return MomentVector(basis=self.basis, values=factor * self.values)

    def as_dict(self) -> dict:
        return dict(zip(self.basis.labels, map(float, self.values)))


@dataclass(frozen=True, eq=False)
class NormalizedMoments:
    """Нормированные моменты φ_k = u_k / u_0, k >= 1"""

    basis: AngularBasis
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values))

    def to_moments(self, density: float = 1.0) -> MomentVector:
        return MomentVector(basis=self.basis, values=density * np.concatenate([[1.0], self.values]))


@dataclass(frozen=True)
class RealizabilityVerdict:
    realizable: bool
    margin: float


@dataclass(frozen=True)
class DiracPair:
    """w₊δ(μ-μ₊) + w₋δ(μ-μ₋)"""

    positions: Tuple[float, float]
    weights: Tuple[float, float]
