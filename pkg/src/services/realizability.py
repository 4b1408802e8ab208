import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from src.core import config
from src.core.errors import DomainError, RealizabilityError, UnsupportedModelError
from src.models import (AngularBasis, BasisKind, DiracPair, MomentVector, NormalizedMoments, Quadrature,
                        RealizabilityVerdict)
from src.services.basis import basis_matrix, gauss_half_quadrature, isotropic_moments

logger = logging.getLogger(__name__)

__all__ = (
    "is_checkable",
    "margins",
    "check",
    "check_half_moments",
    "phi1_bounds",
    "implied_full_moment",
    "representing_measure_dmm2",
    "regularize",
    "regularize_moments",
    "sample_realizable",
)


def _is_dmm2(basis: AngularBasis) -> bool:
    return basis.kind is BasisKind.DIFF_MIXED and basis.order == 2


def is_checkable(basis: AngularBasis) -> bool:
    """Есть ли для базиса явная характеризация реализуемого множества"""
    return (
        _is_dmm2(basis)
        or (basis.kind is BasisKind.MIXED and basis.order == 1)
        or (basis.kind is BasisKind.FULL_MONOMIAL and basis.order == 1)
    )


def _bounds(phi2p, phi2m):
    with np.errstate(invalid="ignore"):
        lower = phi2p - np.sqrt(phi2m * (1.0 - phi2p))
        upper = np.sqrt(phi2p * (1.0 - phi2m)) - phi2m
    return lower, upper


def _dmm2_margin(phi1: np.ndarray, phi2p: np.ndarray, phi2m: np.ndarray) -> np.ndarray:
    sign = np.minimum(phi2p, phi2m)
    lower, upper = _bounds(phi2p, phi2m)
    distance = np.minimum(phi1 - lower, upper - phi1)
    # при phi2 вне [0, 1] корни комплексные: отступ задаётся самими знаковыми условиями
    outside = np.minimum(sign, np.minimum(1.0 - phi2p, 1.0 - phi2m))
    return np.where(np.isnan(distance), outside, np.minimum(sign, distance))


def margins(basis: AngularBasis, moments: np.ndarray) -> np.ndarray:
    """Знаковый отступ до границы реализуемого множества для каждой строки moments"""
    moments = np.atleast_2d(np.asarray(moments, dtype=float))
    if not is_checkable(basis):
        raise UnsupportedModelError(
            f"Проверка реализуемости для базиса {basis.kind.value} N={basis.order} не реализована."
        )
    rho = moments[:, 0]
    valid = np.isfinite(moments).all(axis=1) & (rho > 0)
    result = np.full(len(moments), -np.inf)
    if not valid.any():
        return result
    phi = moments[valid, 1:] / rho[valid, None]
    if _is_dmm2(basis):
        result[valid] = _dmm2_margin(phi[:, 0], phi[:, 1], phi[:, 2])
    elif basis.kind is BasisKind.MIXED:
        result[valid] = np.minimum(1.0 - (phi[:, 0] - phi[:, 1]), np.minimum(phi[:, 0], -phi[:, 1]))
    else:
        result[valid] = 1.0 - np.abs(phi[:, 0])
    return result


def check(u: MomentVector, tol: float = config.REALIZABILITY_TOL) -> RealizabilityVerdict:
    margin = float(margins(u.basis, u.values)[0])
    return RealizabilityVerdict(realizable=margin >= -tol, margin=margin)


def check_half_moments(u0: float, u1: float, u2: float, side: int,
                       tol: float = config.REALIZABILITY_TOL) -> RealizabilityVerdict:
    """Полумоментные условия u0 >= ±u1 >= u2 >= 0, u0 u2 >= u1^2 на полуоси side = ±1"""
    if side not in (1, -1):
        raise DomainError("side должен быть равен 1 или -1.")
    if not (u0 > 0 and all(map(math.isfinite, (u0, u1, u2)))):
        return RealizabilityVerdict(realizable=False, margin=-math.inf)
    first, second = side * u1 / u0, u2 / u0
    margin = min(1.0 - first, first - second, second, second - first ** 2)
    return RealizabilityVerdict(realizable=margin >= -tol, margin=margin)


def phi1_bounds(phi2p: float, phi2m: float, tol: float = config.REALIZABILITY_TOL) -> Tuple[float, float]:
    """Допустимый отрезок для phi1 при заданных phi2±"""
    if not (0.0 <= phi2p <= 1.0 and 0.0 <= phi2m <= 1.0) or phi2p + phi2m > 1.0 + tol:
        raise DomainError(f"Пустой отрезок для phi1: phi2p = {phi2p}, phi2m = {phi2m}.")
    lower, upper = _bounds(phi2p, phi2m)
    return float(min(lower, upper)), float(max(lower, upper))


def implied_full_moment(u: MomentVector) -> float:
    """u0 (u2p + u2m) - u1^2, полное условие второго порядка"""
    if not _is_dmm2(u.basis):
        raise UnsupportedModelError("Условие определено только для DMM2.")
    u0, u1, u2p, u2m = u.values
    return float(u0 * (u2p + u2m) - u1 ** 2)


def representing_measure_dmm2(u: MomentVector, tol: float = config.REALIZABILITY_TOL) -> DiracPair:
    """Пара дельта-функций, воспроизводящая моменты DMM2"""
    if not _is_dmm2(u.basis):
        raise UnsupportedModelError("Представляющая мера построена только для DMM2.")
    verdict = check(u, tol)
    if not verdict.realizable:
        raise RealizabilityError(f"Вектор моментов не реализуем (отступ {verdict.margin:.3e}).")
    rho = u.density
    phi1, phi2p, phi2m = (float(v) for v in u.values[1:] / rho)
    phi2p, phi2m = max(phi2p, 0.0), max(phi2m, 0.0)

    if phi2p == 0.0 and phi2m == 0.0:
        return DiracPair(positions=(0.0, 0.0), weights=(rho, 0.0))
    if phi2m == 0.0:
        # слева второй момент равен нулю: остаток массы стоит в mu = 0
        position, weight = _half_atom(phi1, phi2p, 1, tol)
        return DiracPair(positions=(position, 0.0), weights=(rho * weight, rho * (1.0 - weight)))
    if phi2p == 0.0:
        position, weight = _half_atom(phi1, phi2m, -1, tol)
        return DiracPair(positions=(0.0, position), weights=(rho * (1.0 - weight), rho * weight))

    spread = math.sqrt(phi2p * phi2m * max(phi2p + phi2m - phi1 ** 2, 0.0))
    total = phi2p + phi2m
    plus = _half_atom((phi2p * phi1 + spread) / total, phi2p, 1, tol)
    minus = _half_atom((phi2m * phi1 - spread) / total, phi2m, -1, tol)
    return DiracPair(positions=(plus[0], minus[0]), weights=(rho * plus[1], rho * minus[1]))


def _half_atom(phi1: float, phi2: float, side: int, tol: float) -> Tuple[float, float]:
    """Положение и доля атома на полуоси side по его первому и второму моментам"""
    if abs(phi1) <= tol:
        return 0.0, 0.0
    lower, upper = (0.0, 1.0) if side > 0 else (-1.0, 0.0)
    return min(max(phi2 / phi1, lower), upper), min(phi1 ** 2 / phi2, 1.0)


def regularize(phi: NormalizedMoments, r: float) -> NormalizedMoments:
    """(1 - r) phi + r phi_iso"""
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"Параметр регуляризации r = {r} вне [0, 1].")
    iso = isotropic_moments(phi.basis)[1:]
    return NormalizedMoments(basis=phi.basis, values=(1.0 - r) * phi.values + r * iso)


def regularize_moments(basis: AngularBasis, moments: np.ndarray, r) -> np.ndarray:
    """Та же регуляризация в пространстве моментов; плотность не меняется. r - число или массив по строкам"""
    moments = np.atleast_2d(moments)
    r = np.broadcast_to(np.asarray(r, dtype=float), (len(moments),))[:, None]
    return (1.0 - r) * moments + r * moments[:, :1] * isotropic_moments(basis)


def sample_realizable(seed: int, count: int, basis: AngularBasis,
                      quadrature: Optional[Quadrature] = None) -> List[MomentVector]:
    """Моменты анзацев exp(b^T alpha) со случайными alpha из [-4, 4]^n"""
    if count < 1:
        raise DomainError("count должен быть не меньше 1.")
    quadrature = quadrature or gauss_half_quadrature()
    rng = np.random.default_rng(seed)
    alpha = rng.uniform(-4.0, 4.0, size=(count, basis.n))
    matrix = basis_matrix(basis, quadrature.nodes)
    moments = (np.exp(alpha @ matrix) * quadrature.weights) @ matrix.T
    return [MomentVector(basis=basis, values=row) for row in moments]
