from __future__ import annotations

from typing import TYPE_CHECKING

from .area import block_area, levy_area
from .generator import (
    covariance,
    fgn,
    increment_autocovariance,
    iter_batches,
    sample,
    sample_batch,
)
from .models import AreaProcess, FbmPath, Grid
from .paths import holder_profile, increments, subsample, write_csv

if TYPE_CHECKING:
    from argparse import _SubParsersAction


def setup(subparsers: "_SubParsersAction") -> None:
    from .command import register

    register(subparsers)


__all__ = (
    "Grid",
    "FbmPath",
    "AreaProcess",
    "covariance",
    "increment_autocovariance",
    "fgn",
    "sample",
    "sample_batch",
    "iter_batches",
    "levy_area",
    "block_area",
    "increments",
    "subsample",
    "holder_profile",
    "write_csv",
)
