import csv
import logging
from pathlib import Path
from typing import Iterable, Sequence, Union

from src.output.sink import AbstractSink, format_value

logger = logging.getLogger(__name__)

__all__ = ("CsvSink",)


class CsvSink(AbstractSink):
    """Таблицы как CSV-файлы <name>.csv в каталоге; комментарии - строки с '#'"""

    def __init__(self, target: Union[str, Path]):
        super().__init__(target=Path(target))
        self.target.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        return self.target / f"{name}.csv"

    def write_table(self, name: str, header: Sequence[str], rows: Iterable[Sequence], comments: Sequence[str] = (),
                    digits: int = 12) -> Path:
        path = self.path(name)
        with path.open("w", newline="", encoding="utf-8") as handle:
            for comment in comments:
                handle.write(f"#{comment}\n")
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_value(value, digits) for value in row])
        logger.info("Записан файл %s", path)
        return path

    def close(self):
        pass
