import numpy as np
import pytest

from src.models import AngularBasis, BasisKind
from src.services import ClosureService, get_closure_service


@pytest.fixture
def dmm2() -> AngularBasis:
    return AngularBasis(kind=BasisKind.DIFF_MIXED, order=2)


@pytest.fixture
def closure(dmm2: AngularBasis) -> ClosureService:
    return get_closure_service(dmm2)


@pytest.fixture
def tight_closure(dmm2: AngularBasis) -> ClosureService:
    return get_closure_service(dmm2, 50, 1e-12)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)
