import math
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field, validator

from src.core.errors import ConfigError
from src.models import AngularBasis, ModelId

__all__ = ("MomentsRequest", "RealizabilityResponse", "MeasureRequest", "MeasureResponse")


class MomentsRequest(BaseModel):
    basis: str = "dmm2"
    moments: List[float] = Field(min_items=1)
    tol: Optional[float] = Field(default=None, gt=0)

    @validator("basis")
    def check_basis(cls, v):
        try:
            ModelId.parse(v)
        except ConfigError as error:
            raise ValueError(error.detail)
        return v.lower()

    @validator("moments")
    def check_finite(cls, v):
        if not all(math.isfinite(value) for value in v):
            raise ValueError("Моменты должны быть конечными числами.")
        return v

    @property
    def angular_basis(self) -> AngularBasis:
        return ModelId.parse(self.basis).basis


class RealizabilityResponse(BaseModel):
    realizable: bool
    # None, если отступ бесконечен (нулевая или отрицательная плотность)
    margin: Optional[float]


class MeasureRequest(BaseModel):
    moments: Tuple[float, float, float, float]


class MeasureResponse(BaseModel):
    positions: Tuple[float, float]
    weights: Tuple[float, float]
