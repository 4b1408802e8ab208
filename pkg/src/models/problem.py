import hashlib
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, validator

from src.core import config
from src.core.errors import ConfigError
from src.models.basis import AngularBasis, BasisKind
from src.models.collision import Scattering

__all__ = (
    "Segment",
    "InitialKind",
    "InitialCondition",
    "BoundaryKind",
    "BoundaryCondition",
    "ProblemConfig",
    "ModelFamily",
    "ModelId",
    "RunManifest",
)


class Segment(BaseModel):
    """Кусок кусочно-постоянного коэффициента на [from, to]"""

    start: float = Field(alias="from")
    end: float = Field(alias="to")
    value: float = Field(ge=0)

    class Config:
        allow_population_by_field_name = True
        allow_mutation = False

    @validator("end")
    def check_order(cls, v, values):
        if "start" in values and v <= values["start"]:
            raise ValueError("Конец отрезка должен быть правее начала.")
        return v

    def contains(self, x: np.ndarray) -> np.ndarray:
        return (x >= self.start) & (x <= self.end)


class InitialKind(str, Enum):
    VACUUM = "vacuum"
    PLANE_SOURCE_DELTA = "plane_source_delta"


class InitialCondition(BaseModel):
    kind: InitialKind = InitialKind.VACUUM
    psi_vac: float = Field(default=config.PSI_VAC, gt=0)

    class Config:
        allow_mutation = False


class BoundaryKind(str, Enum):
    VACUUM_ISO = "vacuum_iso"
    BEAM = "beam"
    REFLECTIVE = "reflective"


class BoundaryCondition(BaseModel):
    kind: BoundaryKind = BoundaryKind.VACUUM_ISO
    psi_vac: float = Field(default=config.PSI_VAC, gt=0)
    center: float = Field(default=1.0, ge=-1, le=1)
    width: float = Field(default=config.BEAM_WIDTH, gt=0)

    class Config:
        allow_mutation = False


class ProblemConfig(BaseModel):
    name: str = "custom"
    domain: Tuple[float, float]
    n_cells: int = Field(default=config.N_CELLS, ge=1)
    t_final: float = Field(gt=0)
    cfl: float = Field(default=config.CFL, gt=0, le=1)
    sigma_a: List[Segment] = []
    sigma_s: List[Segment] = []
    q: List[Segment] = []
    ic: InitialCondition = InitialCondition()
    bc_left: BoundaryCondition = BoundaryCondition()
    bc_right: BoundaryCondition = BoundaryCondition()
    scattering: Scattering = Scattering.LAPLACE_BELTRAMI

    class Config:
        allow_mutation = False

    @validator("domain")
    def check_domain(cls, v):
        if not v[0] < v[1]:
            raise ValueError("Левая граница области должна быть меньше правой.")
        return v

    @validator("sigma_a", "sigma_s", "q")
    def check_overlaps(cls, v):
        segments = sorted(v, key=lambda segment: segment.start)
        for left, right in zip(segments, segments[1:]):
            if right.start < left.end:
                raise ValueError(
                    f"Отрезки [{left.start}, {left.end}] и [{right.start}, {right.end}] перекрываются."
                )
        return segments

    @property
    def dx(self) -> float:
        return (self.domain[1] - self.domain[0]) / self.n_cells

    def cell_centers(self) -> np.ndarray:
        return self.domain[0] + (np.arange(self.n_cells) + 0.5) * self.dx

    def coefficient(self, name: str, x: np.ndarray) -> np.ndarray:
        """Значения sigma_a / sigma_s / q в точках x (вне отрезков - ноль)"""
        values = np.zeros_like(x, dtype=float)
        assigned = np.zeros_like(x, dtype=bool)
        for segment in getattr(self, name):
            hit = segment.contains(x) & ~assigned
            values[hit] = segment.value
            assigned |= hit
        return values


class ModelFamily(str, Enum):
    DMM = "DMM"
    MM = "MM"
    M = "M"
    PN = "PN"


_ALLOWED_ORDERS = {
    ModelFamily.DMM: range(2, 3),
    ModelFamily.MM: range(1, 3),
    ModelFamily.M: range(1, 4),
    ModelFamily.PN: range(1, 200),
}
_BASIS_KINDS = {
    ModelFamily.DMM: BasisKind.DIFF_MIXED,
    ModelFamily.MM: BasisKind.MIXED,
    ModelFamily.M: BasisKind.FULL_MONOMIAL,
    ModelFamily.PN: BasisKind.LEGENDRE,
}
_MODEL_PATTERN = re.compile(r"^(dmm|mm|pn|m)(\d+)$", re.IGNORECASE)


@dataclass(frozen=True)
class ModelId:
    family: ModelFamily
    order: int

    def __post_init__(self):
        if self.order not in _ALLOWED_ORDERS[self.family]:
            raise ConfigError(f"Модель {self.family.value}{self.order} не поддерживается.")

    def __str__(self) -> str:
        return f"{self.family.value}{self.order}"

    @classmethod
    def parse(cls, text: str) -> "ModelId":
        match = _MODEL_PATTERN.match(text.strip())
        if not match:
            raise ConfigError(f"Неизвестная модель: {text!r}.")
        return cls(family=ModelFamily(match.group(1).upper()), order=int(match.group(2)))

    @property
    def basis(self) -> AngularBasis:
        return AngularBasis(kind=_BASIS_KINDS[self.family], order=self.order)

    @property
    def is_linear(self) -> bool:
        return self.family is ModelFamily.PN


class RunManifest(BaseModel):
    config: str
    models: List[str]
    out_dir: Path = config.OUTPUT_DIR
    n_cells: Optional[int] = Field(default=None, ge=1)
    cfl: Optional[float] = Field(default=None, gt=0, le=1)
    quad_points: int = Field(default=config.QUAD_POINTS, ge=1)
    gradient_tol: float = Field(default=config.GRADIENT_TOL, gt=0)
    seed: int = 0

    @validator("models")
    def check_models(cls, v):
        if not v:
            raise ValueError("Список моделей пуст.")
        for text in v:
            try:
                ModelId.parse(text)
            except ConfigError as error:
                raise ValueError(error.detail)
        return v

    def model_ids(self) -> List[ModelId]:
        return [ModelId.parse(text) for text in self.models]

    def digest(self) -> str:
        return hashlib.sha256(self.json(sort_keys=True).encode("utf-8")).hexdigest()[:16]
