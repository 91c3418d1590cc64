from __future__ import annotations

import sys
from contextlib import contextmanager
from datetime import timedelta
from logging import Logger, getLogger
from pathlib import Path
from time import perf_counter
from typing import Any, Generator, Optional

import orjson
from humanize import precisedelta
from xxhash import xxh64_intdigest

JSON_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY


def fmtseconds(seconds: timedelta | float | int, unit: str = "microseconds") -> str:
    if not isinstance(seconds, timedelta):
        seconds = timedelta(seconds=seconds)

    return precisedelta(seconds, minimum_unit=unit)


def derive_seed(master: int, *parts: int | str) -> int:
    """
    Derive a child seed from a master seed and a stream description.

    The result only depends on the arguments, so batches can be
    scheduled on any number of threads in any order.
    """

    key = ":".join(str(p) for p in (master, *parts))
    return xxh64_intdigest(key) & 0x7FFF_FFFF_FFFF_FFFF


def dumps(obj: Any) -> bytes:
    return orjson.dumps(obj, option=JSON_OPTIONS)


def loads(data: bytes | str) -> Any:
    return orjson.loads(data)


def read_json(path: str | Path) -> Any:
    return loads(Path(path).read_bytes())


def write_output(data: bytes | str, out: Optional[str | Path]) -> None:
    if isinstance(data, str):
        data = data.encode()

    if out is None or str(out) == "-":
        sys.stdout.buffer.write(data)
        if not data.endswith(b"\n"):
            sys.stdout.buffer.write(b"\n")

        sys.stdout.flush()
        return

    Path(out).write_bytes(data)


@contextmanager
def capture_time(
    msg: Optional[str] = None,
    log: Optional[Logger] = None,
) -> Generator:
    start = perf_counter()
    if not log:
        log = getLogger("fracdev/utils")

    if not msg:
        msg = log.findCaller()[2]

    try:
        yield
    finally:
        duration = perf_counter() - start
        log.info(f"{msg} in [dim]{fmtseconds(duration)}[/dim].", extra={"markup": True})


__all__ = (
    "fmtseconds",
    "derive_seed",
    "dumps",
    "loads",
    "read_json",
    "write_output",
    "capture_time",
)
