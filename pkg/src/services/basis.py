from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial import legendre
from scipy import special

from src.core import config
from src.core.errors import DomainError, QuadratureError
from src.models import AngularBasis, BasisKind, Quadrature, Support

__all__ = (
    "basis_matrix",
    "basis_eval",
    "gauss_half_quadrature",
    "integrate",
    "isotropic_moments",
    "parity_matrix",
)


def basis_matrix(basis: AngularBasis, mu: np.ndarray) -> np.ndarray:
    """Все компоненты базиса в точках mu, форма (n, len(mu))"""
    mu = np.asarray(mu, dtype=float)
    if basis.kind is BasisKind.LEGENDRE:
        return np.stack([special.eval_legendre(l, mu) for l in range(basis.order + 1)])
    rows = []
    for power, support in basis.components:
        row = mu ** power
        # в mu = 0 полумоменты равны нулю
        if support is Support.PLUS:
            row = np.where(mu > 0, row, 0.0)
        elif support is Support.MINUS:
            row = np.where(mu < 0, row, 0.0)
        rows.append(row)
    return np.stack(rows)


def basis_eval(basis: AngularBasis, mu: float) -> np.ndarray:
    if not -1.0 <= mu <= 1.0:
        raise DomainError(f"mu = {mu} вне отрезка [-1, 1].")
    return basis_matrix(basis, np.array([mu]))[:, 0]


@lru_cache()
def gauss_half_quadrature(points_per_half: int = config.QUAD_POINTS) -> Quadrature:
    """Гаусс-Лежандр на каждой полуоси; левая половина - точное отражение правой"""
    if points_per_half < 1:
        raise DomainError("Число узлов квадратуры должно быть положительным.")
    nodes, weights = legendre.leggauss(points_per_half)
    nodes_plus = 0.5 * (nodes + 1.0)
    weights_plus = 0.5 * weights
    return Quadrature(
        nodes_plus=nodes_plus,
        weights_plus=weights_plus,
        nodes_minus=-nodes_plus[::-1],
        weights_minus=weights_plus[::-1].copy(),
        points_per_half=points_per_half,
    )


def _integrate_half(nodes: np.ndarray, weights: np.ndarray, f: Callable) -> float:
    values = np.asarray(f(nodes), dtype=float)
    if values.shape != nodes.shape:
        values = np.array([f(node) for node in nodes], dtype=float)
    bad = ~np.isfinite(values)
    if bad.any():
        node = float(nodes[np.argmax(bad)])
        raise QuadratureError(f"Подынтегральная функция не конечна в узле mu = {node!r}.", node=node)
    return float(weights @ values)


def integrate(q: Quadrature, f: Callable, support: Support = Support.FULL) -> float:
    if support is Support.PLUS:
        return _integrate_half(q.nodes_plus, q.weights_plus, f)
    if support is Support.MINUS:
        return _integrate_half(q.nodes_minus, q.weights_minus, f)
    return _integrate_half(q.nodes_plus, q.weights_plus, f) + _integrate_half(q.nodes_minus, q.weights_minus, f)


def isotropic_moments(basis: AngularBasis) -> np.ndarray:
    """Нормированные моменты изотропного распределения: <b>/2, нулевая компонента равна 1"""
    if basis.kind is BasisKind.LEGENDRE:
        moments = np.zeros(basis.n)
        moments[0] = 1.0
        return moments
    moments = []
    for power, support in basis.components:
        half = 1.0 / (2 * (power + 1))
        if support is Support.PLUS:
            moments.append(half)
        elif support is Support.MINUS:
            moments.append(half * (-1) ** power)
        else:
            moments.append(0.0 if power % 2 else 2 * half)
    return np.array(moments)


def parity_matrix(basis: AngularBasis) -> np.ndarray:
    """Матрица P с b(-mu) = P b(mu)"""
    n = basis.n
    parity = np.zeros((n, n))
    if basis.kind is BasisKind.LEGENDRE:
        np.fill_diagonal(parity, [(-1) ** l for l in range(n)])
        return parity
    mirror = {Support.FULL: Support.FULL, Support.PLUS: Support.MINUS, Support.MINUS: Support.PLUS}
    for i, (power, support) in enumerate(basis.components):
        j = basis.index(power, mirror[support])
        parity[i, j] = (-1) ** power
    return parity

