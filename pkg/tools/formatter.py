import csv
import io
import math
from typing import Any, Iterable, Sequence

from rich.table import Table


class plural:
    value: int | Sequence
    suffix: str

    def __init__(self, value: int | Sequence, suffix: str = ""):
        self.value = value
        self.suffix = suffix

    def __format__(self, format_spec: str) -> str:
        v = self.value if isinstance(self.value, int) else len(self.value)
        singular, sep, plural = format_spec.partition("|")
        plural = plural or f"{singular}s"
        return f"{v:,} {singular if abs(v) == 1 else plural}{self.suffix}"


def human_join(seq: Sequence[str], delim: str = ", ", final: str = "and") -> str:
    size = len(seq)
    if size == 0:
        return ""

    if size == 1:
        return seq[0]

    if size == 2:
        return f"{seq[0]} {final} {seq[1]}"

    return delim.join(seq[:-1]) + f" {final} {seq[-1]}"


def exact(value: float) -> str:
    """Shortest decimal that reads back to the same double."""

    if isinstance(value, int) and not isinstance(value, bool):
        return str(value)

    value = float(value)
    if math.isnan(value):
        return "nan"

    if math.isinf(value):
        return "inf" if value > 0 else "-inf"

    return repr(value)


def csv_bytes(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            [exact(v) if isinstance(v, (float, int)) and not isinstance(v, bool) else v for v in row]
        )

    return buffer.getvalue().encode()


def table(title: str, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> Table:
    output = Table(title=title, title_justify="left", header_style="bold")
    for column in columns:
        output.add_column(column, overflow="fold")

    for row in rows:
        output.add_row(
            *(
                f"{v:.10g}" if isinstance(v, float) else str(v)
                for v in row
            )
        )

    return output

