from fastapi import APIRouter, Depends

from src.api.v1.resources.dependencies import closure_service
from src.api.v1.resources.errors import moment_vector, unprocessable
from src.api.v1.schemas import ClosureResponse, MomentsRequest
from src.core.errors import MomentModelError
from src.services import ClosureService

router = APIRouter()


@router.post(path="/solve", response_model=ClosureResponse, summary="Решить двойственную задачу", tags=["closure"])
def closure_solve(request: MomentsRequest, service: ClosureService = Depends(closure_service)) -> ClosureResponse:
    u = moment_vector(request.angular_basis, request.moments)
    try:
        solution = service.solve_dual(u)
    except MomentModelError as error:
        raise unprocessable(error)
    return ClosureResponse(
        alpha=solution.alpha.alpha.tolist(),
        flux=solution.flux_moments.tolist(),
        residual=solution.residual_norm,
        iterations=solution.iterations,
        regularization=solution.regularization_used,
    )
