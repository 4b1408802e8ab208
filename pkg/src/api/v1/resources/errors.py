from http import HTTPStatus

from fastapi import HTTPException

from src.core.errors import MomentModelError
from src.models import AngularBasis, MomentVector

__all__ = ("unprocessable", "moment_vector")


def unprocessable(error: MomentModelError) -> HTTPException:
    return HTTPException(status_code=HTTPStatus.UNPROCESSABLE_ENTITY, detail=error.detail)


def moment_vector(basis: AngularBasis, values) -> MomentVector:
    try:
        return MomentVector(basis=basis, values=values)
    except ValueError as error:
        raise HTTPException(status_code=HTTPStatus.UNPROCESSABLE_ENTITY, detail=str(error))
