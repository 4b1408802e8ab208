from typing import Optional, Sequence

__all__ = (
    "MomentModelError",
    "ConfigError",
    "ProfileMismatchError",
    "DomainError",
    "UnsupportedModelError",
    "ContractError",
    "NumericalError",
    "QuadratureError",
    "ClosureOverflowError",
    "ClosureFailure",
    "ConditioningError",
    "EigenError",
    "StepFailure",
    "RealizabilityError",
)


class MomentModelError(Exception):
    """Базовая ошибка библиотеки. exit_code используется CLI."""

    exit_code: int = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class ConfigError(MomentModelError):
    exit_code = 2


class ProfileMismatchError(ConfigError):
    pass


class DomainError(MomentModelError):
    exit_code = 2


class UnsupportedModelError(MomentModelError):
    exit_code = 2


class ContractError(MomentModelError):
    exit_code = 3


class NumericalError(MomentModelError):
    exit_code = 3


class QuadratureError(NumericalError):
    def __init__(self, detail: str, node: float):
        super().__init__(detail)
        self.node = node


class ClosureOverflowError(NumericalError):
    pass


class ClosureFailure(NumericalError):
    def __init__(self, detail: str, residual: float, index: Optional[int] = None):
        super().__init__(detail)
        self.residual = residual
        self.index = index


class ConditioningError(NumericalError):
    pass


class EigenError(NumericalError):
    pass


class StepFailure(NumericalError):
    def __init__(self, detail: str, cell: int, time: float, moments: Optional[Sequence[float]] = None):
        super().__init__(detail)
        self.cell = cell
        self.time = time
        self.moments = None if moments is None else [float(v) for v in moments]


class RealizabilityError(MomentModelError):
    exit_code = 4
