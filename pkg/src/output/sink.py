import numbers
from abc import ABC, abstractmethod
from typing import Iterable, Sequence

__all__ = ("AbstractSink", "format_value")


def format_value(value, digits: int) -> str:
    """Числа в CSV: точка как разделитель, digits значащих цифр, целые без изменений"""
    if isinstance(value, str):
        return value
    if isinstance(value, numbers.Integral):
        return str(int(value))
    return format(float(value), f".{digits}g")


class AbstractSink(ABC):
    def __init__(self, target):
        self.target = target

    @abstractmethod
    def write_table(self, name: str, header: Sequence[str], rows: Iterable[Sequence], comments: Sequence[str] = (),
                    digits: int = 12):
        pass

    @abstractmethod
    def close(self):
        pass
