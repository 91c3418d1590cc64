from __future__ import annotations

from logging import getLogger
from pathlib import Path
from typing import Any, Iterable, Literal, Optional, Sequence

from rich.console import Console
from rich.table import Table

from tools import dumps, write_output
from tools.formatter import csv_bytes

log = getLogger("fracdev/context")

OutputFormat = Literal["json", "text", "csv"]


class Context:
    """
    Per-invocation state shared by every command.

    Commands never print directly; they hand a JSON-ready payload and
    optional text/CSV renderings to :meth:`emit`.
    """

    __slots__ = ("format", "out", "seed", "threads", "warnings")

    def __init__(
        self,
        *,
        format: OutputFormat = "json",
        out: Optional[str | Path] = None,
        seed: Optional[int] = None,
        threads: int = 1,
    ):
        self.format: OutputFormat = format
        self.out = out
        self.seed = seed
        self.threads = max(1, threads)
        self.warnings: list[str] = []

    def __repr__(self) -> str:
        return f"<Context format={self.format!r} seed={self.seed} threads={self.threads}>"

    def seed_or(self, default: int) -> int:
        """The --seed override when given, otherwise the seed a file or command default sets."""

        return default if self.seed is None else self.seed

    def warn(self, message: str) -> None:
        self.warnings.append(message)
        log.warning(message)

    def emit(
        self,
        payload: Any,
        *,
        table: Optional[Table | Sequence[Table]] = None,
        csv: Optional[tuple[Sequence[str], Iterable[Sequence[Any]]]] = None,
    ) -> None:
        if self.format == "csv" and csv is not None:
            header, rows = csv
            write_output(csv_bytes(header, rows), self.out)
            return

        if self.format == "text" and table is not None:
            tables = [table] if isinstance(table, Table) else list(table)
            if self.out is None or str(self.out) == "-":
                console = Console()
                for item in tables:
                    console.print(item)

                return

            with open(self.out, "w", encoding="utf-8") as fp:
                console = Console(file=fp, width=160, color_system=None)
                for item in tables:
                    console.print(item)

            return

        if self.format != "json":
            log.debug("No %s rendering for this command, falling back to JSON.", self.format)

        if self.warnings and isinstance(payload, dict):
            payload = {**payload, "warnings": self.warnings}

        write_output(dumps(payload), self.out)
