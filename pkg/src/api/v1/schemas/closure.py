from typing import List

from pydantic import BaseModel

__all__ = ("ClosureResponse",)


class ClosureResponse(BaseModel):
    alpha: List[float]
    flux: List[float]
    residual: float
    iterations: int
    regularization: float
