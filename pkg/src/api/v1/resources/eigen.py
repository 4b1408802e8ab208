from fastapi import APIRouter, Depends

from src.api.v1.resources.dependencies import eigen_service, scan_service
from src.api.v1.resources.errors import moment_vector, unprocessable
from src.api.v1.schemas import MomentsRequest, ScanRequest, ScanResponse, SpectrumResponse
from src.core.errors import MomentModelError
from src.models import SCAN_HEADER
from src.output import MemorySink
from src.services import EigenService

router = APIRouter()


@router.post(path="/spectrum", response_model=SpectrumResponse, summary="Спектр якобиана потока", tags=["eigen"])
def spectrum(request: MomentsRequest, service: EigenService = Depends(eigen_service)) -> SpectrumResponse:
    u = moment_vector(request.angular_basis, request.moments)
    try:
        result = service.spectrum(u)
    except MomentModelError as error:
        raise unprocessable(error)
    return SpectrumResponse(
        eigenvalues=result.eigenvalues.tolist(),
        min_gap=result.min_adjacent_gap,
        max_gap=result.max_adjacent_gap,
        max_imag_residual=result.max_imag_residual,
    )


@router.post(path="/scan", response_model=ScanResponse, summary="Скан собственных значений DMM2", tags=["eigen"])
def scan(request: ScanRequest, service: EigenService = Depends(scan_service)) -> ScanResponse:
    try:
        table = service.scan(request.mode, request.resolution, request.reg)
    except MomentModelError as error:
        raise unprocessable(error)
    sink = MemorySink()
    sink.write_table("scan", SCAN_HEADER, table.records())
    # таблица отдаётся строками: nan не сериализуется в JSON
    header, *rows = sink.render("scan", digits=10)
    sink.close()
    return ScanResponse(header=header, rows=rows, failed=sum(row.failed for row in table.rows))
