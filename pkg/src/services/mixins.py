import numpy as np

from src.models import AngularBasis, Quadrature
from src.services.basis import basis_eval, basis_matrix

__all__ = ("ServiceMixin",)


class ServiceMixin:
    def __init__(self, basis: AngularBasis, quadrature: Quadrature):
        self.basis: AngularBasis = basis
        self.quadrature: Quadrature = quadrature
        # базис в узлах квадратуры, форма (n, 2p)
        self.nodes: np.ndarray = quadrature.nodes
        self.weights: np.ndarray = quadrature.weights
        self.plus: np.ndarray = quadrature.nodes > 0
        self.matrix: np.ndarray = basis_matrix(basis, quadrature.nodes)
        self.junction_vector: np.ndarray = basis_eval(basis, 0.0)
