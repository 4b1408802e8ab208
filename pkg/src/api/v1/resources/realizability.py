import math

from fastapi import APIRouter

from src.api.v1.resources.errors import moment_vector, unprocessable
from src.api.v1.schemas import MeasureRequest, MeasureResponse, MomentsRequest, RealizabilityResponse
from src.core import config
from src.core.errors import MomentModelError
from src.models import AngularBasis, BasisKind
from src.services import check, representing_measure_dmm2

router = APIRouter()


@router.post(path="/check", response_model=RealizabilityResponse, summary="Проверить реализуемость",
             tags=["realizability"])
def realizability_check(request: MomentsRequest) -> RealizabilityResponse:
    u = moment_vector(request.angular_basis, request.moments)
    try:
        verdict = check(u, request.tol or config.REALIZABILITY_TOL)
    except MomentModelError as error:
        raise unprocessable(error)
    margin = verdict.margin if math.isfinite(verdict.margin) else None
    return RealizabilityResponse(realizable=verdict.realizable, margin=margin)


@router.post(path="/representing-measure", response_model=MeasureResponse,
             summary="Представляющая мера DMM2", tags=["realizability"])
def representing_measure(request: MeasureRequest) -> MeasureResponse:
    u = moment_vector(AngularBasis(kind=BasisKind.DIFF_MIXED, order=2), request.moments)
    try:
        measure = representing_measure_dmm2(u)
    except MomentModelError as error:
        raise unprocessable(error)
    return MeasureResponse(positions=measure.positions, weights=measure.weights)
