from typing import List

from pydantic import BaseModel, Field

from src.core import config
from src.models import ScanMode

__all__ = ("SpectrumResponse", "ScanRequest", "ScanResponse")


class SpectrumResponse(BaseModel):
    eigenvalues: List[float]
    min_gap: float
    max_gap: float
    max_imag_residual: float


class ScanRequest(BaseModel):
    mode: ScanMode = ScanMode.MEAN_CUT
    resolution: int = Field(default=11, ge=2, le=config.SCAN_RESOLUTION)
    reg: float = config.SCAN_REGULARIZATION


class ScanResponse(BaseModel):
    header: List[str]
    # значения отформатированы как в CSV; nan для точек без замыкания
    rows: List[List[str]]
    failed: int
