from __future__ import annotations

from pathlib import Path
from typing import Optional

import numpy as np

from tools import write_output
from tools.exceptions import InputError
from tools.formatter import csv_bytes

from .models import FbmPath

__all__ = ("increments", "subsample", "holder_profile", "write_csv", "csv_rows")


def increments(path: FbmPath) -> np.ndarray:
    return path.increments


def subsample(path: FbmPath, factor: int) -> FbmPath:
    """The same sample seen on a grid `factor` times coarser."""

    grid = path.grid.coarsen(factor)
    return FbmPath(grid, np.ascontiguousarray(path.values[..., ::factor]), path.H, path.seed)


def holder_profile(path: FbmPath, gamma: float) -> np.ndarray:
    """
    sup |δB_{st}| / |t - s|^γ over dyadic pairs (k 2^j, (k + 1) 2^j) of the
    grid, per component (and per path for batches).
    """

    if gamma <= 0:
        raise InputError("Hölder exponent must be positive")

    dt = path.grid.dt
    best = np.zeros(path.values.shape[:-1])
    width = 1
    while width <= path.grid.steps:
        points = path.values[..., ::width]
        ratio = np.abs(np.diff(points, axis=-1)) / (width * dt) ** gamma
        if ratio.shape[-1]:
            best = np.maximum(best, ratio.max(axis=-1))

        width *= 2

    return best


def csv_rows(path: FbmPath):
    if path.batched:
        raise InputError("CSV output holds a single path")

    for t, column in zip(path.grid.times, path.values.T):
        yield (float(t), *map(float, column))


def write_csv(path: FbmPath, out: Optional[str | Path]) -> None:
    header = ("time", *(f"B{i}" for i in range(1, path.d + 1)))
    write_output(csv_bytes(header, csv_rows(path)), out)
