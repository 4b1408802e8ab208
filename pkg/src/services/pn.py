import logging
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import special

from src.core import config
from src.core.errors import ConfigError
from src.models import (AngularBasis, BasisKind, BoundaryCondition, BoundaryKind, MassLedger, MeshState, PnOperators,
                        ProblemConfig, RunResult, Scattering, StepDiagnostics, DIAGNOSTICS_HEADER)
from src.output import AbstractSink
from src.services.basis import gauss_half_quadrature
from src.services.fvsolver import boundary_distribution, initial_state

logger = logging.getLogger(__name__)

__all__ = ("pn_operators", "PnSolver", "pn_run")


@lru_cache()
def pn_operators(N: int, scattering: Scattering = Scattering.LAPLACE_BELTRAMI) -> PnOperators:
    """Поток компоненты l: ((l+1) m_{l+1} + l m_{l-1}) / (2l+1), m_{N+1} = 0"""
    if N < 1:
        raise ConfigError("Порядок P_N должен быть не меньше 1.")
    degree = np.arange(N + 1)
    matrix = np.zeros((N + 1, N + 1))
    matrix[degree[:-1], degree[:-1] + 1] = (degree[:-1] + 1) / (2 * degree[:-1] + 1)
    matrix[degree[1:], degree[1:] - 1] = degree[1:] / (2 * degree[1:] + 1)
    if scattering is Scattering.ISOTROPIC:
        diagonal = np.where(degree == 0, 0.0, -1.0)
    else:
        diagonal = -0.5 * degree * (degree + 1)
    return PnOperators(A=matrix, C_diag=diagonal)


class PnSolver:
    """Конечные объёмы первого порядка с потоком Лакса-Фридрихса (скорость 1) для P_N"""

    def __init__(self, cfg: ProblemConfig, N: int, points_per_half: int = config.QUAD_POINTS):
        self.cfg = cfg
        self.basis = AngularBasis(kind=BasisKind.LEGENDRE, order=N)
        self.operators = pn_operators(N, cfg.scattering)
        self.dx = cfg.dx
        self.x = cfg.cell_centers()
        self.sigma_a = cfg.coefficient("sigma_a", self.x)
        self.sigma_s = cfg.coefficient("sigma_s", self.x)
        self.source = cfg.coefficient("q", self.x)
        self.parity = (-1.0) ** np.arange(N + 1)
        quadrature = gauss_half_quadrature(points_per_half)
        self.ghost_left = self._ghost(cfg.bc_left, quadrature)
        self.ghost_right = self._ghost(cfg.bc_right, quadrature)

    def _ghost(self, bc: BoundaryCondition, quadrature) -> Optional[np.ndarray]:
        """Моменты Лежандра m_l = ⟨P_l ψ_b⟩; для отражающей границы строятся на каждом шаге"""
        if bc.kind is BoundaryKind.REFLECTIVE:
            return None
        psi = boundary_distribution(bc, quadrature.nodes, quadrature.weights)
        legendre = np.stack([special.eval_legendre(l, quadrature.nodes) for l in range(self.basis.n)])
        return legendre @ (quadrature.weights * psi)

    def face_fluxes(self, moments: np.ndarray) -> np.ndarray:
        left = self.ghost_left if self.ghost_left is not None else self.parity * moments[0]
        right = self.ghost_right if self.ghost_right is not None else self.parity * moments[-1]
        padded = np.vstack([left, moments, right])
        flux = padded @ self.operators.A.T
        return 0.5 * (flux[:-1] + flux[1:]) - 0.5 * (padded[1:] - padded[:-1])

    def step(self, state: MeshState, dt: float, ledger: MassLedger):
        dx = self.dx
        faces = self.face_fluxes(state.moments)
        explicit = state.moments - dt / dx * (faces[1:] - faces[:-1])
        explicit[:, 0] += dt * 2.0 * self.source
        denominator = (1.0 + dt * self.sigma_a)[:, None] - (dt * self.sigma_s)[:, None] * self.operators.C_diag
        moments = explicit / denominator

        left, right = faces[0, 0], faces[-1, 0]
        ledger.boundary_inflow += dt * (max(left, 0.0) + max(-right, 0.0))
        ledger.boundary_outflow += dt * (max(-left, 0.0) + max(right, 0.0))
        ledger.source_input += dt * dx * 2.0 * float(self.source.sum())
        ledger.absorbed += dx * float((explicit[:, 0] - moments[:, 0]).sum())

        state = MeshState(basis=self.basis, dx=dx, moments=moments, multipliers=state.multipliers,
                          time=state.time + dt)
        return state, StepDiagnostics(t=state.time, mass=state.total_mass(), outflow=ledger.boundary_outflow,
                                      safeguard_count=0, newton_iter_mean=0.0)

    def run(self, model: str = "") -> RunResult:
        cfg = self.cfg
        state = initial_state(cfg, self.basis)
        ledger = MassLedger(initial_mass=state.total_mass())
        result = RunResult(model=model or f"PN{self.basis.order}", state=state, ledger=ledger, x=self.x)
        dt_full = cfg.cfl * self.dx
        while cfg.t_final - state.time > 1e-12 * cfg.t_final:
            state, diagnostics = self.step(state, min(dt_full, cfg.t_final - state.time), ledger)
            result.diagnostics.append(diagnostics)
        result.state = state
        logger.info("%s: t = %g, масса %.12g, отток %.3e", result.model, state.time, state.total_mass(),
                    ledger.boundary_outflow)
        return result


def pn_run(cfg: ProblemConfig, N: int, out: Optional[AbstractSink] = None, digest: str = "",
           points_per_half: int = config.QUAD_POINTS) -> RunResult:
    result = PnSolver(cfg, N, points_per_half).run()
    if out is not None:
        comments = [f"model={result.model}"] + ([f"manifest={digest}"] if digest else [])
        out.write_table(f"profile_{result.model}", ("x", "u0"), zip(result.x, result.state.moments[:, 0]),
                        comments=comments, digits=12)
        out.write_table(f"diagnostics_{result.model}", DIAGNOSTICS_HEADER,
                        [step.as_record() for step in result.diagnostics], comments=comments, digits=12)
    return result
