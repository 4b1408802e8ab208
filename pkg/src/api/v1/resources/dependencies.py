from src.api.v1.resources.errors import unprocessable
from src.api.v1.schemas import MomentsRequest
from src.core import config
from src.core.errors import MomentModelError
from src.services import ClosureService, EigenService, get_closure_service, get_eigen_service

__all__ = ("closure_service", "eigen_service", "scan_service")


def closure_service(request: MomentsRequest) -> ClosureService:
    """Сервис замыкания для базиса и допуска из тела запроса"""
    try:
        return get_closure_service(request.angular_basis, config.QUAD_POINTS, request.tol or config.GRADIENT_TOL)
    except MomentModelError as error:
        raise unprocessable(error)


def eigen_service(request: MomentsRequest) -> EigenService:
    try:
        return get_eigen_service(request.angular_basis)
    except MomentModelError as error:
        raise unprocessable(error)


def scan_service() -> EigenService:
    return get_eigen_service()
