import logging
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from src.core import config
from src.core.errors import ConditioningError, DomainError, EigenError, NumericalError, UnsupportedModelError
from src.models import (AngularBasis, BasisKind, ClosureSolution, EigenResult, MomentVector, NormalizedMoments,
                        ScanMode, ScanRow, ScanTable)
from src.services.closure import ClosureService, get_closure_service
from src.services.realizability import phi1_bounds, regularize

logger = logging.getLogger(__name__)

__all__ = ("flux_jacobian", "jacobian_from_matrices", "eigenvalues_sorted", "EigenService", "get_eigen_service")


def jacobian_from_matrices(hessian: np.ndarray, jacobian: np.ndarray) -> np.ndarray:
    """∂F/∂u = J H⁻¹; H симметрична, поэтому J H⁻¹ = (H⁻¹ Jᵀ)ᵀ"""
    try:
        product = np.linalg.solve(hessian, jacobian.T).T
    except np.linalg.LinAlgError as error:
        raise ConditioningError(f"Гессиан вырожден: {error}.")
    if not np.all(np.isfinite(product)):
        raise ConditioningError("Якобиан потока не конечен.")
    return product


def flux_jacobian(sol: ClosureSolution, closure: Optional[ClosureService] = None) -> np.ndarray:
    closure = closure or get_closure_service(sol.u_reproduced.basis)
    hessian, jacobian = closure.dual_matrices(sol.alpha)
    return jacobian_from_matrices(hessian, jacobian)


def eigenvalues_sorted(matrix: np.ndarray) -> EigenResult:
    """Собственные значения по возрастанию вещественной части"""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DomainError(f"Ожидалась квадратная матрица, получено {matrix.shape}.")
    try:
        values = np.linalg.eigvals(matrix)
    except np.linalg.LinAlgError as error:
        raise EigenError(f"Задача на собственные значения не сошлась: {error}.")
    values = values[np.argsort(values.real, kind="stable")]
    gaps = np.diff(values.real)
    return EigenResult(
        eigenvalues=values.real.copy(),
        max_imag_residual=float(np.abs(values.imag).max()) if values.size else 0.0,
        min_adjacent_gap=float(gaps.min()) if gaps.size else 0.0,
        max_adjacent_gap=float(gaps.max()) if gaps.size else 0.0,
    )


class EigenService:
    """Спектр якобиана потока и сканы по реализуемому множеству DMM2"""

    def __init__(self, closure: ClosureService):
        self.closure = closure
        self.basis = closure.basis

    def spectrum(self, u: MomentVector) -> EigenResult:
        solution = self.closure.solve_dual(u)
        return eigenvalues_sorted(flux_jacobian(solution, self.closure))

    @staticmethod
    def grid(resolution: int) -> List[Tuple[float, float]]:
        """Узлы (phi2p, phi2m) с phi2p + phi2m <= 1 в лексикографическом порядке индексов"""
        if resolution < 2:
            raise DomainError("Разрешение скана должно быть не меньше 2.")
        last = resolution - 1
        return [(i / last, j / last) for i in range(resolution) for j in range(resolution - i)]

    def _points(self, mode: ScanMode, resolution: int, r: float) -> List[Tuple[Tuple[float, ...], Tuple[float, ...]]]:
        points = []
        for phi2p, phi2m in self.grid(resolution):
            lower, upper = phi1_bounds(phi2p, phi2m)
            if mode is ScanMode.MEAN_CUT:
                source = (phi2p, phi2m, 0.5 * (lower + upper))
                points.append((source, source))
                continue
            for phi1 in (lower, upper):
                source = (phi2p, phi2m, phi1)
                moved = regularize(NormalizedMoments(basis=self.basis, values=(phi1, phi2p, phi2m)), r).values
                points.append((source, (float(moved[1]), float(moved[2]), float(moved[0]))))
        return points

    def scan(self, mode: ScanMode, resolution: int = config.SCAN_RESOLUTION,
             r: float = config.SCAN_REGULARIZATION) -> ScanTable:
        if not (self.basis.kind is BasisKind.DIFF_MIXED and self.basis.order == 2):
            raise UnsupportedModelError("Скан собственных значений реализован только для DMM2.")
        if mode is ScanMode.BOUNDARY and not 0.0 < r < 1.0:
            raise DomainError(f"Для скана границы нужно 0 < r < 1, получено {r}.")
        points = self._points(mode, resolution, r)
        logger.info("Скан %s: %d точек, разрешение %d", mode.value, len(points), resolution)

        moments = np.array([(1.0, phi1, phi2p, phi2m) for _, (phi2p, phi2m, phi1) in points])
        batch = self.closure.solve_batch(moments, raise_on_failure=False)
        hessians, jacobians = {}, {}
        converged = np.flatnonzero(batch.converged)
        if converged.size:
            hessian, jacobian = self.closure.dual_matrices_batch(batch.alpha[converged])
            hessians = dict(zip(converged, hessian))
            jacobians = dict(zip(converged, jacobian))

        table = ScanTable(mode=mode, resolution=resolution, regularization=r if mode is ScanMode.BOUNDARY else 0.0)
        for index, (source, (phi2p, phi2m, phi1)) in enumerate(points):
            eigen = None
            if index in hessians:
                try:
                    eigen = eigenvalues_sorted(jacobian_from_matrices(hessians[index], jacobians[index]))
                except NumericalError as error:
                    logger.debug("Строка %d скана пропущена: %s", index, error.detail)
            table.rows.append(ScanRow(
                phi2p=phi2p,
                phi2m=phi2m,
                phi1=phi1,
                eigen=eigen,
                regularization=float(batch.regularization[index]) if eigen is not None else float("nan"),
                source=source,
            ))
        failed = sum(row.failed for row in table.rows)
        if failed:
            logger.warning("Скан %s: замыкание не найдено в %d точках из %d", mode.value, failed, len(points))
        return table


@lru_cache()
def get_eigen_service(basis: AngularBasis = AngularBasis(kind=BasisKind.DIFF_MIXED, order=2),
                      points_per_half: int = config.QUAD_POINTS) -> EigenService:
    return EigenService(closure=get_closure_service(basis, points_per_half))
