import logging
from typing import Optional, Tuple

import numpy as np

from src.core import config
from src.core.errors import ConfigError, StepFailure, UnsupportedModelError
from src.models import (DIAGNOSTICS_HEADER, AngularBasis, BasisKind, BoundaryCondition, BoundaryKind, ClosureBatch,
                        InitialKind, MassLedger, MeshState, ModelId, ProblemConfig, RunResult, StepDiagnostics)
from src.output import AbstractSink
from src.services.basis import isotropic_moments, parity_matrix
from src.services.closure import ClosureService, get_closure_service
from src.services.collision import affine_decomposition
from src.services.mixins import ServiceMixin
from src.services.realizability import is_checkable, margins, regularize_moments

logger = logging.getLogger(__name__)

__all__ = (
    "initial_state",
    "boundary_distribution",
    "numerical_flux",
    "KineticSolver",
    "run",
    "emit_result",
)


def initial_state(cfg: ProblemConfig, basis: AngularBasis) -> MeshState:
    """Изотропный вакуум плотности ψ_vac, для плоского источника плюс дельта в двух центральных ячейках"""
    n_cells, dx = cfg.n_cells, cfg.dx
    iso = isotropic_moments(basis)
    density = np.full(n_cells, 2.0 * cfg.ic.psi_vac)
    if cfg.ic.kind is InitialKind.PLANE_SOURCE_DELTA:
        if n_cells % 2:
            raise ConfigError("Для начального условия с дельта-функцией нужно чётное число ячеек.")
        middle = n_cells // 2
        density[middle - 1:middle + 1] += 1.0 / dx
    moments = density[:, None] * iso
    multipliers = ClosureService.cold_start(moments)
    return MeshState(basis=basis, dx=dx, moments=moments, multipliers=multipliers, time=0.0)


def boundary_distribution(bc: BoundaryCondition, mu: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Граничное распределение ψ_b в узлах; пучок нормирован так, что ⟨ψ_b⟩ = 1 по той же квадратуре"""
    if bc.kind is BoundaryKind.VACUUM_ISO:
        return np.full_like(mu, bc.psi_vac)
    if bc.kind is BoundaryKind.BEAM:
        profile = np.exp(-bc.width * (mu - bc.center) ** 2)
        return profile / (weights @ profile)
    raise ConfigError("У отражающей границы нет заданного распределения.")


def numerical_flux(sol_left, sol_right) -> np.ndarray:
    """Кинетический поток через грань: ⟨μ b ψ̂_L⟩₊ + ⟨μ b ψ̂_R⟩₋"""
    return np.asarray(sol_left.flux_plus) + np.asarray(sol_right.flux_minus)


class KineticSolver(ServiceMixin):
    """Схема IMEX первого порядка с кинетическим потоком для моделей минимума энтропии"""

    def __init__(self, cfg: ProblemConfig, basis: AngularBasis, closure: Optional[ClosureService] = None):
        if basis.kind is BasisKind.LEGENDRE:
            raise UnsupportedModelError("Линейные модели P_N решаются отдельным решателем.")
        closure = closure or get_closure_service(basis)
        super().__init__(basis=basis, quadrature=closure.quadrature)
        self.cfg = cfg
        self.closure = closure
        self.dx = cfg.dx
        self.x = cfg.cell_centers()
        self.sigma_a = cfg.coefficient("sigma_a", self.x)
        self.sigma_s = cfg.coefficient("sigma_s", self.x)
        self.source = cfg.coefficient("q", self.x)
        self.iso = isotropic_moments(basis)
        self.collision = affine_decomposition(basis, cfg.scattering)
        self.parity = parity_matrix(basis)
        self.checkable = is_checkable(basis)
        self.inflow_left = self._inflow(cfg.bc_left, self.plus)
        self.inflow_right = self._inflow(cfg.bc_right, ~self.plus)

    def _inflow(self, bc: BoundaryCondition, incoming: np.ndarray) -> Optional[np.ndarray]:
        """⟨μ b ψ_b⟩ по входящим направлениям; None для отражающей границы"""
        # входящий поток берётся из самого ψ_b, замыкание духовой ячейки не решается;
        # для изотропной границы это совпадает с замыканием изотропных духовых моментов
        if bc.kind is BoundaryKind.REFLECTIVE:
            return None
        psi = boundary_distribution(bc, self.nodes, self.weights)
        flux = self.matrix * self.nodes * self.weights * psi
        return flux[:, incoming].sum(axis=1)

    def _closure(self, moments: np.ndarray, warm: np.ndarray, time: float) -> ClosureBatch:
        batch = self.closure.solve_batch(moments, warm=warm, raise_on_failure=False)
        failed = np.flatnonzero(~batch.converged)
        if failed.size:
            cell = int(failed[0])
            raise StepFailure(
                f"Замыкание не найдено в ячейке {cell} при t = {time:.6g} (невязка {batch.residual[cell]:.3e}).",
                cell=cell,
                time=time,
                moments=moments[cell],
            )
        return batch

    def face_fluxes(self, batch: ClosureBatch) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Потоки через все грани, а также входящая и исходящая части на границах (по u0)"""
        left_in = self.inflow_left if self.inflow_left is not None else -self.parity @ batch.flux_minus[0]
        right_in = self.inflow_right if self.inflow_right is not None else -self.parity @ batch.flux_plus[-1]
        faces = np.empty((len(batch) + 1, self.basis.n))
        faces[1:-1] = batch.flux_plus[:-1] + batch.flux_minus[1:]
        faces[0] = left_in + batch.flux_minus[0]
        faces[-1] = batch.flux_plus[-1] + right_in
        inflow = left_in[0] - right_in[0]
        outflow = batch.flux_plus[-1][0] - batch.flux_minus[0][0]
        return faces, inflow, outflow

    def _aux(self, batch: ClosureBatch) -> np.ndarray:
        return np.column_stack([batch.half_densities, batch.half_first, batch.junction])

    def _safeguard(self, moments: np.ndarray, time: float) -> Tuple[np.ndarray, int]:
        """Минимальная изотропная регуляризация для ячеек, не прошедших проверку реализуемости"""
        bad_density = np.flatnonzero(~(moments[:, 0] > 0))
        if bad_density.size:
            cell = int(bad_density[0])
            raise StepFailure(f"Неположительная плотность в ячейке {cell} при t = {time:.6g}.",
                              cell=cell, time=time, moments=moments[cell])
        if not self.checkable:
            return moments, 0
        bad = np.flatnonzero(margins(self.basis, moments) < -config.REALIZABILITY_TOL)
        if not bad.size:
            return moments, 0
        low, high = np.zeros(bad.size), np.ones(bad.size)
        for _ in range(config.SAFEGUARD_BISECTIONS):
            middle = 0.5 * (low + high)
            inside = margins(self.basis, regularize_moments(self.basis, moments[bad], middle)) >= config.SAFEGUARD_MARGIN
            high = np.where(inside, middle, high)
            low = np.where(inside, low, middle)
        moments = moments.copy()
        moments[bad] = regularize_moments(self.basis, moments[bad], high)
        logger.warning("t = %.6g: регуляризация реализуемости в %d ячейках (r до %.3e)", time, bad.size, high.max())
        return moments, int(bad.size)

    def step(self, state: MeshState, dt: float, ledger: MassLedger) -> Tuple[MeshState, StepDiagnostics]:
        dx = self.dx
        time = state.time + dt
        batch = self._closure(state.moments, state.multipliers, state.time)
        faces, inflow, outflow = self.face_fluxes(batch)

        # явный перенос и источник
        source = 2.0 * self.source[:, None] * self.iso
        explicit = state.moments - dt / dx * (faces[1:] - faces[:-1]) + dt * source
        multipliers = batch.alpha
        iterations = float(batch.iterations.mean())

        # неявные столкновения и поглощение с запаздывающей нелинейной частью
        rhs = explicit.copy()
        if np.any(self.collision.aux_matrix) and np.any(self.sigma_s > 0):
            lagged = self._closure(explicit, batch.alpha, time)
            multipliers = lagged.alpha
            rhs += dt * self.sigma_s[:, None] * (self._aux(lagged) @ self.collision.aux_matrix.T)
        identity = np.eye(self.basis.n)
        system = ((1.0 + dt * self.sigma_a)[:, None, None] * identity
                  - (dt * self.sigma_s)[:, None, None] * self.collision.matrix)
        moments = np.linalg.solve(system, rhs[..., None])[..., 0]

        moments, triggered = self._safeguard(moments, time)

        ledger.boundary_inflow += dt * inflow
        ledger.boundary_outflow += dt * outflow
        ledger.source_input += dt * dx * float(source[:, 0].sum())
        ledger.absorbed += dx * float((explicit[:, 0] - moments[:, 0]).sum())

        state = MeshState(basis=self.basis, dx=dx, moments=moments, multipliers=multipliers, time=time)
        diagnostics = StepDiagnostics(
            t=time,
            mass=state.total_mass(),
            outflow=ledger.boundary_outflow,
            safeguard_count=triggered,
            newton_iter_mean=iterations,
        )
        logger.debug("t = %.6g, масса %.12g, итераций Ньютона %.2f", time, diagnostics.mass, iterations)
        return state, diagnostics

    def run(self, model: str = "", state: Optional[MeshState] = None) -> RunResult:
        cfg = self.cfg
        state = state or initial_state(cfg, self.basis)
        ledger = MassLedger(initial_mass=state.total_mass())
        result = RunResult(model=model, state=state, ledger=ledger, x=self.x)
        dt_full = cfg.cfl * self.dx
        logger.info("Запуск %s: %d ячеек, dt = %.4g, t_final = %g", model or self.basis.kind.value,
                    cfg.n_cells, dt_full, cfg.t_final)
        while cfg.t_final - state.time > 1e-12 * cfg.t_final:
            dt = min(dt_full, cfg.t_final - state.time)
            state, diagnostics = self.step(state, dt, ledger)
            result.diagnostics.append(diagnostics)
        result.state = state
        logger.info("%s: t = %g, масса %.12g, отток %.3e, регуляризаций %d", model, state.time,
                    state.total_mass(), ledger.boundary_outflow, result.safeguard_total)
        return result


def emit_result(result: RunResult, labels, sink: AbstractSink, digest: str = "") -> None:
    """Профиль по ячейкам и диагностика шагов в sink"""
    comments = [f"model={result.model}"] + ([f"manifest={digest}"] if digest else [])
    rows = [(x,) + tuple(row) for x, row in zip(result.x, result.state.moments)]
    sink.write_table(f"profile_{result.model}", ("x",) + tuple(labels), rows, comments=comments, digits=12)
    sink.write_table(f"diagnostics_{result.model}", DIAGNOSTICS_HEADER,
                     [step.as_record() for step in result.diagnostics], comments=comments, digits=12)


def run(cfg: ProblemConfig, model: ModelId, out: Optional[AbstractSink] = None, digest: str = "",
        points_per_half: int = config.QUAD_POINTS, gradient_tol: float = config.GRADIENT_TOL) -> RunResult:
    if model.is_linear:
        raise UnsupportedModelError(f"{model} - линейная модель, используйте pn_run.")
    basis = model.basis
    solver = KineticSolver(cfg, basis, closure=get_closure_service(basis, points_per_half, gradient_tol))
    result = solver.run(model=str(model))
    if out is not None:
        emit_result(result, basis.labels, out, digest)
    return result
