import logging
from functools import lru_cache
from typing import Optional, Tuple, Union

import numpy as np

from src.core import config
from src.core.errors import ClosureFailure, ClosureOverflowError, DomainError
from src.models import AngularBasis, ClosureBatch, ClosureSolution, MomentVector, Multipliers, SolverOptions
from src.services.basis import basis_matrix, gauss_half_quadrature
from src.services.mixins import ServiceMixin
from src.services.realizability import regularize_moments

logger = logging.getLogger(__name__)

__all__ = ("ClosureService", "get_closure_service", "default_options")

EPS = np.finfo(float).eps


class ClosureService(ServiceMixin):
    """Двойственная задача минимума энтропии Максвелла-Больцмана: ψ̂ = exp(bᵀα)"""

    def __init__(self, basis: AngularBasis, options: SolverOptions):
        super().__init__(basis=basis, quadrature=options.quadrature)
        self.options = options
        self.flux_matrix: np.ndarray = self.matrix * self.nodes

    def _weighted(self, alpha: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Веса квадратуры, умноженные на exp(bᵀα - shift), и множитель exp(shift) по строкам"""
        exponent = alpha @ self.matrix
        peak = exponent.max(axis=1)
        shift = np.where(peak > config.EXP_SHIFT_THRESHOLD, peak, 0.0)
        with np.errstate(over="ignore", invalid="ignore"):
            return np.exp(exponent - shift[:, None]) * self.weights, np.exp(shift)

    def _objective(self, alpha: np.ndarray, target: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        weighted, scale = self._weighted(alpha)
        with np.errstate(over="ignore", invalid="ignore"):
            mass = weighted.sum(axis=1) * scale
            linear = np.einsum("kn,kn->k", target, alpha)
            return mass - linear, np.abs(mass) + np.abs(linear)

    def _derivatives(self, alpha: np.ndarray, target: np.ndarray):
        weighted, scale = self._weighted(alpha)
        with np.errstate(over="ignore", invalid="ignore"):
            moments = (weighted @ self.matrix.T) * scale[:, None]
            hessian = np.einsum("km,im,jm->kij", weighted, self.matrix, self.matrix) * scale[:, None, None]
            value = moments[:, 0] - np.einsum("kn,kn->k", target, alpha)
        return value, moments - target, hessian

    @staticmethod
    def _newton_direction(hessian: np.ndarray, gradient: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Направление -H⁻¹g через разложение Холецкого; ok = False, где H не удалось разложить"""
        ok = np.isfinite(hessian).all(axis=(1, 2)) & np.isfinite(gradient).all(axis=1)
        factors = np.broadcast_to(np.eye(hessian.shape[1]), hessian.shape).copy()
        gradient = np.where(ok[:, None], gradient, 0.0)
        try:
            if ok.any():
                factors[ok] = np.linalg.cholesky(hessian[ok])
        except np.linalg.LinAlgError:
            # по одной ячейке, со сдвигом диагонали при неудаче
            for i in np.flatnonzero(ok):
                matrix = hessian[i]
                for jitter in (0.0, 1e-14 * np.trace(matrix)):
                    try:
                        factors[i] = np.linalg.cholesky(matrix + jitter * np.eye(len(matrix)))
                        break
                    except np.linalg.LinAlgError:
                        continue
                else:
                    ok[i] = False
                    factors[i] = np.eye(len(matrix))
        lower = np.linalg.solve(factors, -gradient[..., None])
        direction = np.linalg.solve(np.swapaxes(factors, 1, 2), lower)[..., 0]
        return direction, ok

    def _newton(self, target: np.ndarray, start: np.ndarray):
        """Затухающий метод Ньютона с правилом Армихо для всех строк target одновременно"""
        options = self.options
        alpha = start.copy()
        count = len(alpha)
        iterations = np.zeros(count, dtype=int)
        alive = np.ones(count, dtype=bool)
        value, gradient, hessian = self._derivatives(alpha, target)
        residual = np.abs(gradient).max(axis=1)
        residual[~np.isfinite(residual)] = np.inf
        alive &= np.isfinite(value)

        for _ in range(options.max_iterations):
            active = np.flatnonzero(alive & (residual > options.gradient_tol))
            if not active.size:
                break
            direction, ok = self._newton_direction(hessian[active], gradient[active])
            alive[active[~ok]] = False
            active, direction = active[ok], direction[ok]
            slope = np.einsum("kn,kn->k", gradient[active], direction)
            step = np.ones(len(active))
            accepted = np.zeros(len(active), dtype=bool)
            searching = np.ones(len(active), dtype=bool)
            while searching.any():
                rows = np.flatnonzero(searching)
                trial = alpha[active[rows]] + step[rows, None] * direction[rows]
                trial_value, magnitude = self._objective(trial, target[active[rows]])
                bound = value[active[rows]] + options.armijo_c * step[rows] * slope[rows] + 64 * EPS * magnitude
                good = np.isfinite(trial_value) & (trial_value <= bound)
                accepted[rows[good]] = True
                searching[rows[good]] = False
                step[rows[~good]] *= 0.5
                exhausted = rows[~good][step[rows[~good]] < options.min_step]
                searching[exhausted] = False
            alive[active[~accepted]] = False
            moved = active[accepted]
            if not moved.size:
                continue
            alpha[moved] += step[accepted, None] * direction[accepted]
            iterations[moved] += 1
            value[moved], gradient[moved], hessian[moved] = self._derivatives(alpha[moved], target[moved])
            residual[moved] = np.abs(gradient[moved]).max(axis=1)
            residual[moved[~np.isfinite(residual[moved])]] = np.inf

        converged = residual <= options.gradient_tol
        return alpha, converged, iterations, residual

    @staticmethod
    def cold_start(moments: np.ndarray) -> np.ndarray:
        """Изотропные множители (ln(u0/2), 0, ..., 0)"""
        moments = np.atleast_2d(moments)
        start = np.zeros_like(moments, dtype=float)
        start[:, 0] = np.log(moments[:, 0] / 2.0)
        return start

    def _fields(self, alpha: np.ndarray) -> dict:
        weighted, scale = self._weighted(alpha)
        minus = ~self.plus
        with np.errstate(over="ignore", invalid="ignore"):
            fields = dict(
                moments=(weighted @ self.matrix.T) * scale[:, None],
                flux_plus=(weighted[:, self.plus] @ self.flux_matrix[:, self.plus].T) * scale[:, None],
                flux_minus=(weighted[:, minus] @ self.flux_matrix[:, minus].T) * scale[:, None],
                half_densities=np.stack(
                    [weighted[:, self.plus].sum(axis=1), weighted[:, minus].sum(axis=1)], axis=1
                ) * scale[:, None],
                half_first=np.stack(
                    [weighted[:, self.plus] @ self.nodes[self.plus], weighted[:, minus] @ self.nodes[minus]], axis=1
                ) * scale[:, None],
                junction=np.exp(alpha @ self.junction_vector),
            )
        for name, value in fields.items():
            if not np.all(np.isfinite(value)):
                raise ClosureOverflowError(f"Переполнение экспоненты при вычислении {name}.")
        return fields

    def moments_of(self, alpha: np.ndarray) -> np.ndarray:
        """Моменты анзацев для набора множителей, форма (k, n)"""
        return self._fields(np.atleast_2d(np.asarray(alpha, dtype=float)))["moments"]

    def solve_batch(self, moments: np.ndarray, warm: Optional[np.ndarray] = None,
                    raise_on_failure: bool = True) -> ClosureBatch:
        """Решает двойственную задачу для каждой строки moments, поднимаясь по лестнице регуляризации"""
        moments = np.atleast_2d(np.asarray(moments, dtype=float))
        count, n = moments.shape
        if n != self.basis.n:
            raise DomainError(f"Ожидалось {self.basis.n} моментов, получено {n}.")
        density = moments[:, 0]
        valid = np.isfinite(moments).all(axis=1) & (density > 0)
        scale = np.where(valid, density, 1.0)
        # задача решается для u / u0, затем α0 сдвигается на ln u0
        normalized = np.where(valid[:, None], moments / scale[:, None], 0.0)
        log_scale = np.log(scale)

        alpha = np.full((count, n), np.nan)
        residual = np.full(count, np.inf)
        iterations = np.zeros(count, dtype=int)
        regularization = np.full(count, np.nan)
        converged = np.zeros(count, dtype=bool)
        pending = valid.copy()

        for rung, r in enumerate(self.options.regularization_ladder):
            rows = np.flatnonzero(pending)
            if not rows.size:
                break
            target = regularize_moments(self.basis, normalized[rows], r)
            start = self.cold_start(target)
            if rung == 0 and warm is not None:
                guess = np.array(warm, dtype=float)[rows]
                guess[:, 0] -= log_scale[rows]
                usable = np.isfinite(guess).all(axis=1)
                start[usable] = guess[usable]
            found, ok, steps, res = self._newton(target, start)
            iterations[rows] += steps
            alpha[rows] = found
            residual[rows] = res * scale[rows]
            done = rows[ok]
            converged[done] = True
            regularization[done] = r
            pending[done] = False
            if r > 0 and done.size:
                logger.debug("Регуляризация r=%g понадобилась для %d строк", r, done.size)

        alpha[:, 0] += log_scale
        failed = np.flatnonzero(~converged)
        if failed.size and raise_on_failure:
            index = int(failed[0])
            raise ClosureFailure(
                f"Двойственная задача не решена для строки {index}: невязка {residual[index]:.3e}.",
                residual=float(residual[index]),
                index=index,
            )

        shape = {"moments": (n,), "flux_plus": (n,), "flux_minus": (n,), "half_densities": (2,),
                 "half_first": (2,), "junction": ()}
        fields = {name: np.full((count,) + tail, np.nan) for name, tail in shape.items()}
        if converged.any():
            for name, value in self._fields(alpha[converged]).items():
                fields[name][converged] = value
        return ClosureBatch(
            basis=self.basis,
            alpha=alpha,
            residual=residual,
            iterations=iterations,
            regularization=regularization,
            converged=converged,
            **fields,
        )

    def solve_dual(self, u: MomentVector, warm_start: Optional[Multipliers] = None) -> ClosureSolution:
        warm = None if warm_start is None else warm_start.alpha[None, :]
        return self.solve_batch(u.values[None, :], warm=warm)[0]

    def closure_moments(self, alpha: Multipliers) -> ClosureSolution:
        """Все производные величины анзаца при заданных множителях, невязка нулевая"""
        fields = {name: value[0] for name, value in self._fields(alpha.alpha[None, :]).items()}
        return ClosureSolution(
            alpha=alpha,
            u_reproduced=MomentVector(basis=self.basis, values=fields["moments"]),
            flux_moments=fields["flux_plus"] + fields["flux_minus"],
            flux_plus=fields["flux_plus"],
            flux_minus=fields["flux_minus"],
            half_densities=(float(fields["half_densities"][0]), float(fields["half_densities"][1])),
            half_first=(float(fields["half_first"][0]), float(fields["half_first"][1])),
            junction=float(fields["junction"]),
        )

    def dual_derivatives(self, alpha: Multipliers, u: MomentVector) -> Tuple[np.ndarray, np.ndarray]:
        """Градиент ⟨b exp(bᵀα)⟩ - u и гессиан ⟨b bᵀ exp(bᵀα)⟩"""
        _, gradient, hessian = self._derivatives(alpha.alpha[None, :], u.values[None, :])
        if not (np.all(np.isfinite(gradient)) and np.all(np.isfinite(hessian))):
            raise ClosureOverflowError("Переполнение экспоненты в производных двойственной задачи.")
        return gradient[0], hessian[0]

    def dual_matrices_batch(self, alpha: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """H = ⟨b bᵀ ψ̂⟩ и J = ⟨μ b bᵀ ψ̂⟩ для каждой строки alpha"""
        weighted, scale = self._weighted(np.atleast_2d(alpha))
        hessian = np.einsum("km,im,jm->kij", weighted, self.matrix, self.matrix) * scale[:, None, None]
        jacobian = np.einsum("km,im,jm->kij", weighted, self.flux_matrix, self.matrix) * scale[:, None, None]
        return hessian, jacobian

    def dual_matrices(self, alpha: Multipliers) -> Tuple[np.ndarray, np.ndarray]:
        hessian, jacobian = self.dual_matrices_batch(alpha.alpha[None, :])
        return hessian[0], jacobian[0]

    def ansatz_eval(self, alpha: Multipliers, mu: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        points = np.asarray(mu, dtype=float)
        if np.any(np.abs(points) > 1.0):
            raise DomainError("mu должно лежать в отрезке [-1, 1].")
        values = np.exp(alpha.alpha @ basis_matrix(self.basis, np.atleast_1d(points)))
        return float(values[0]) if points.ndim == 0 else values


def default_options(points_per_half: int = config.QUAD_POINTS,
                    gradient_tol: float = config.GRADIENT_TOL) -> SolverOptions:
    return SolverOptions(
        gradient_tol=gradient_tol,
        max_iterations=config.MAX_NEWTON_ITERATIONS,
        quadrature=gauss_half_quadrature(points_per_half),
        regularization_ladder=config.REGULARIZATION_LADDER,
        armijo_c=config.ARMIJO_C,
        min_step=config.MIN_STEP,
    )


@lru_cache()
def get_closure_service(basis: AngularBasis, points_per_half: int = config.QUAD_POINTS,
                        gradient_tol: float = config.GRADIENT_TOL) -> ClosureService:
    return ClosureService(basis=basis, options=default_options(points_per_half, gradient_tol))
