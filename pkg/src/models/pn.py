from dataclasses import dataclass

import numpy as np

__all__ = ("PnOperators",)


@dataclass(frozen=True, eq=False)
class PnOperators:
    """Матрица переноса P_N и диагональ оператора столкновений"""

    A: np.ndarray
    C_diag: np.ndarray

    def __post_init__(self):
        for array in (self.A, self.C_diag):
            array.setflags(write=False)

    @property
    def order(self) -> int:
        return len(self.C_diag) - 1
