from typing import Tuple

from src.models import BoundaryCondition, BoundaryKind, InitialCondition, ProblemConfig, Segment


def uniform(domain: Tuple[float, float], value: float):
    return [Segment(start=domain[0], end=domain[1], value=value)]


def make_config(n_cells: int = 20, domain: Tuple[float, float] = (0.0, 1.0), t_final: float = 0.1,
                sigma_a: float = 0.0, sigma_s: float = 0.0, q: float = 0.0, psi: float = 0.5,
                boundary: BoundaryKind = BoundaryKind.VACUUM_ISO, **extra) -> ProblemConfig:
    """Однородная задача для тестов решателей"""
    return ProblemConfig(
        name="test",
        domain=domain,
        n_cells=n_cells,
        t_final=t_final,
        sigma_a=uniform(domain, sigma_a),
        sigma_s=uniform(domain, sigma_s),
        q=uniform(domain, q),
        ic=extra.pop("ic", InitialCondition(psi_vac=psi)),
        bc_left=BoundaryCondition(kind=boundary, psi_vac=psi),
        bc_right=BoundaryCondition(kind=boundary, psi_vac=psi),
        **extra,
    )
