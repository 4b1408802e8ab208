import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from src.core.errors import ContractError

__all__ = ("Scattering", "CollisionAux", "AffineCollision", "AUX_FIELDS")

# порядок полей во вспомогательном векторе g(aux)
AUX_FIELDS: Tuple[str, ...] = ("u0p", "u0m", "u1p", "u1m", "junction")


class Scattering(str, Enum):
    LAPLACE_BELTRAMI = "laplace_beltrami"
    ISOTROPIC = "isotropic"


@dataclass(frozen=True)
class CollisionAux:
    """Величины замыкания, от которых зависят моменты оператора столкновений"""

    u0p: Optional[float] = None
    u0m: Optional[float] = None
    u1p: Optional[float] = None
    u1m: Optional[float] = None
    junction: Optional[float] = None

    def __post_init__(self):
        for name in AUX_FIELDS:
            value = getattr(self, name)
            if value is not None and not math.isfinite(value):
                raise ContractError(f"Поле {name} должно быть конечным.")
        for name in ("u0p", "u0m", "junction"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ContractError(f"Поле {name} должно быть неотрицательным.")

    def require(self, *names: str) -> None:
        missing = [name for name in names if getattr(self, name) is None]
        if missing:
            raise ContractError(f"Не заданы поля замыкания: {', '.join(missing)}.")

    def as_vector(self) -> np.ndarray:
        return np.array([0.0 if getattr(self, name) is None else getattr(self, name) for name in AUX_FIELDS])


@dataclass(frozen=True, eq=False)
class AffineCollision:
    """collision(u, aux) = matrix @ u + aux_matrix @ aux.as_vector()"""

    matrix: np.ndarray
    aux_matrix: np.ndarray
    required: Tuple[str, ...]

    def __post_init__(self):
        for array in (self.matrix, self.aux_matrix):
            array.setflags(write=False)

    def g(self, aux: CollisionAux) -> np.ndarray:
        aux.require(*self.required)
        return self.aux_matrix @ aux.as_vector()

    def apply(self, u: np.ndarray, aux: CollisionAux) -> np.ndarray:
        return self.matrix @ u + self.g(aux)
