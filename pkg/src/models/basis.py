from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple

import numpy as np

__all__ = ("BasisKind", "Support", "AngularBasis", "Quadrature")


class BasisKind(str, Enum):
    FULL_MONOMIAL = "full_monomial"
    MIXED = "mixed"
    DIFF_MIXED = "diff_mixed"
    LEGENDRE = "legendre"


class Support(str, Enum):
    FULL = "full"
    PLUS = "plus"
    MINUS = "minus"


@dataclass(frozen=True)
class AngularBasis:
    """Угловой базис: вид и порядок N"""

    kind: BasisKind
    order: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("Порядок базиса должен быть не меньше 1.")

    @property
    def n(self) -> int:
        if self.kind is BasisKind.MIXED:
            return 2 * self.order + 1
        if self.kind is BasisKind.DIFF_MIXED:
            return 2 * self.order
        return self.order + 1

    @property
    def components(self) -> Tuple[Tuple[int, Support], ...]:
        """(степень, носитель) каждой компоненты в каноническом порядке"""
        if self.kind is BasisKind.MIXED:
            return (
                ((0, Support.FULL),)
                + tuple((l, Support.PLUS) for l in range(1, self.order + 1))
                + tuple((l, Support.MINUS) for l in range(1, self.order + 1))
            )
        if self.kind is BasisKind.DIFF_MIXED:
            full = tuple((l, Support.FULL) for l in range(min(2, self.order + 1)))
            return (
                full
                + tuple((l, Support.PLUS) for l in range(2, self.order + 1))
                + tuple((l, Support.MINUS) for l in range(2, self.order + 1))
            )
        return tuple((l, Support.FULL) for l in range(self.order + 1))

    @property
    def labels(self) -> Tuple[str, ...]:
        if self.kind is BasisKind.LEGENDRE:
            return tuple(f"m{l}" for l in range(self.order + 1))
        suffix = {Support.FULL: "", Support.PLUS: "p", Support.MINUS: "m"}
        return tuple(f"u{power}{suffix[support]}" for power, support in self.components)

    def index(self, power: int, support: Support) -> int:
        """Номер компоненты (степень, носитель) или -1, если её нет в базисе"""
        try:
            return self.components.index((power, support))
        except ValueError:
            return -1


@dataclass(frozen=True, eq=False)
class Quadrature:
    """Правила Гаусса-Лежандра на [0, 1] и [-1, 0]"""

    nodes_plus: np.ndarray
    weights_plus: np.ndarray
    nodes_minus: np.ndarray
    weights_minus: np.ndarray
    points_per_half: int
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        # узлы по возрастанию: сначала [-1, 0], потом [0, 1]
        object.__setattr__(self, "nodes", np.concatenate([self.nodes_minus, self.nodes_plus]))
        object.__setattr__(self, "weights", np.concatenate([self.weights_minus, self.weights_plus]))
        for array in (self.nodes_plus, self.weights_plus, self.nodes_minus, self.weights_minus,
                      self.nodes, self.weights):
            array.setflags(write=False)
