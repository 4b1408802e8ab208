import logging
from functools import lru_cache
from typing import Tuple

import numpy as np

from src.core.errors import UnsupportedModelError
from src.models import (AUX_FIELDS, AffineCollision, AngularBasis, BasisKind, CollisionAux, MomentVector, Scattering,
                        Support)
from src.services.basis import isotropic_moments

logger = logging.getLogger(__name__)

__all__ = ("required_aux", "collision_moments", "affine_decomposition", "iso_scatter_moments")

# откуда брать полумоменты младших порядков, которых нет в базисе
_AUX_SOURCE = {
    (0, Support.PLUS): "u0p",
    (0, Support.MINUS): "u0m",
    (1, Support.PLUS): "u1p",
    (1, Support.MINUS): "u1m",
}


def required_aux(basis: AngularBasis) -> Tuple[str, ...]:
    """Поля замыкания, нужные моментам оператора Лапласа-Бельтрами в этом базисе"""
    if basis.kind is BasisKind.DIFF_MIXED:
        return (("u0p", "u0m") if basis.order >= 2 else ()) + (("u1p", "u1m") if basis.order >= 3 else ())
    if basis.kind is BasisKind.MIXED:
        return ("junction",) + (("u0p", "u0m") if basis.order >= 2 else ())
    return ()


def _lower_half(basis: AngularBasis, values: np.ndarray, aux: CollisionAux, power: int, support: Support) -> float:
    index = basis.index(power, support)
    if index >= 0:
        return float(values[index])
    return float(getattr(aux, _AUX_SOURCE[(power, support)]))


def collision_moments(basis: AngularBasis, u: MomentVector, aux: CollisionAux,
                      scattering: Scattering = Scattering.LAPLACE_BELTRAMI) -> np.ndarray:
    """⟨b C(ψ̂)⟩ с C = Δ/2, Δ - оператор Лапласа-Бельтрами"""
    if scattering is Scattering.ISOTROPIC:
        return iso_scatter_moments(basis, u)
    values = u.values
    if basis.kind is BasisKind.LEGENDRE:
        degree = np.arange(basis.n)
        return -0.5 * degree * (degree + 1) * values
    aux.require(*required_aux(basis))

    result = np.zeros(basis.n)
    for i, (power, support) in enumerate(basis.components):
        if power == 0:
            continue
        if support is Support.FULL:
            lower = values[basis.index(power - 2, Support.FULL)] if power >= 2 else 0.0
            result[i] = 0.5 * (power * (power - 1) * lower - power * (power + 1) * values[i])
        elif power == 1:
            # след производной в mu = 0 для непрерывного, но не гладкого анзаца
            sign = 1.0 if support is Support.PLUS else -1.0
            result[i] = 0.5 * sign * aux.junction - values[i]
        else:
            lower = _lower_half(basis, values, aux, power - 2, support)
            result[i] = 0.5 * (power * (power - 1) * lower - power * (power + 1) * values[i])
    return result


@lru_cache()
def affine_decomposition(basis: AngularBasis,
                         scattering: Scattering = Scattering.LAPLACE_BELTRAMI) -> AffineCollision:
    """collision_moments(u, aux) = M u + G g(aux), g = (u0p, u0m, u1p, u1m, junction)"""
    n = basis.n
    matrix = np.zeros((n, n))
    aux_matrix = np.zeros((n, len(AUX_FIELDS)))
    if scattering is Scattering.ISOTROPIC:
        matrix = np.outer(isotropic_moments(basis), np.eye(n)[0]) - np.eye(n)
        return AffineCollision(matrix=matrix, aux_matrix=aux_matrix, required=())
    if scattering is not Scattering.LAPLACE_BELTRAMI:
        raise UnsupportedModelError(f"Неизвестный оператор рассеяния: {scattering}.")
    if basis.kind is BasisKind.LEGENDRE:
        degree = np.arange(n)
        return AffineCollision(matrix=np.diag(-0.5 * degree * (degree + 1)), aux_matrix=aux_matrix, required=())

    for i, (power, support) in enumerate(basis.components):
        if power == 0:
            continue
        matrix[i, i] = -0.5 * power * (power + 1)
        if support is not Support.FULL and power == 1:
            matrix[i, i] = -1.0
            aux_matrix[i, AUX_FIELDS.index("junction")] = 0.5 if support is Support.PLUS else -0.5
            continue
        if power < 2:
            continue
        coefficient = 0.5 * power * (power - 1)
        index = basis.index(power - 2, support)
        if index >= 0:
            matrix[i, index] += coefficient
        else:
            aux_matrix[i, AUX_FIELDS.index(_AUX_SOURCE[(power - 2, support)])] = coefficient
    return AffineCollision(matrix=matrix, aux_matrix=aux_matrix, required=required_aux(basis))


def iso_scatter_moments(basis: AngularBasis, u: MomentVector) -> np.ndarray:
    """Моменты изотропного рассеяния ½∫ψ dμ' - ψ"""
    return u.density * isotropic_moments(basis) - u.values
