from typing import Dict, Iterable, List, Sequence, Tuple

from src.output.sink import AbstractSink, format_value

__all__ = ("MemorySink",)


class MemorySink(AbstractSink):
    """Хранит таблицы в памяти: name -> (header, rows, comments)"""

    def __init__(self):
        super().__init__(target={})
        self.tables: Dict[str, Tuple[Tuple[str, ...], List[Tuple], Tuple[str, ...]]] = self.target

    def write_table(self, name: str, header: Sequence[str], rows: Iterable[Sequence], comments: Sequence[str] = (),
                    digits: int = 12):
        self.tables[name] = (tuple(header), [tuple(row) for row in rows], tuple(comments))

    def render(self, name: str, digits: int = 12) -> List[List[str]]:
        """Строки таблицы в том виде, в котором их записал бы CsvSink"""
        header, rows, _ = self.tables[name]
        return [list(header)] + [[format_value(value, digits) for value in row] for row in rows]

    def close(self):
        self.tables.clear()
