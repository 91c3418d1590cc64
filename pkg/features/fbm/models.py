from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from tools.exceptions import IncompatibleGridError, InputError

__all__ = ("Grid", "FbmPath", "AreaProcess")


@dataclass(frozen=True, slots=True)
class Grid:
    """Uniform grid t_k = k T / N on [0, T]."""

    T: float
    steps: int

    def __post_init__(self) -> None:
        if not self.T > 0:
            raise InputError("grid horizon must be positive")

        if self.steps < 1:
            raise InputError("a grid needs at least one step")

    @property
    def dt(self) -> float:
        return self.T / self.steps

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.steps + 1) * self.dt

    def index_of(self, t: float) -> int:
        k = round(t / self.dt)
        if not 0 <= k <= self.steps or abs(k * self.dt - t) > 1e-9 * max(1.0, self.T):
            raise IncompatibleGridError(f"time {t} is not a point of {self}")

        return k

    def coarsen(self, factor: int) -> Grid:
        if factor < 1 or self.steps % factor:
            raise IncompatibleGridError(f"{factor} does not divide {self.steps} steps")

        return Grid(self.T, self.steps // factor)

    def __str__(self) -> str:
        return f"[0, {self.T}] in {self.steps} steps"


@dataclass(frozen=True, eq=False)
class FbmPath:
    """
    d independent fBm components sampled on `grid`. `values` has shape
    (..., d, N + 1); a leading axis, when present, indexes paths.
    """

    grid: Grid
    values: np.ndarray
    H: float
    seed: int

    def __post_init__(self) -> None:
        if self.values.shape[-1] != self.grid.steps + 1:
            raise IncompatibleGridError(
                f"path has {self.values.shape[-1]} points, grid needs {self.grid.steps + 1}"
            )

        self.values.setflags(write=False)

    @property
    def d(self) -> int:
        return self.values.shape[-2]

    @property
    def batched(self) -> bool:
        return self.values.ndim == 3

    @cached_property
    def increments(self) -> np.ndarray:
        return np.diff(self.values, axis=-1)

    def at(self, t: float) -> np.ndarray:
        return self.values[..., self.grid.index_of(t)]


@dataclass(frozen=True, eq=False)
class AreaProcess:
    """
    Per coarse block of `block` fine steps: the increment δx (..., nb, d) and
    the iterated integral x² (..., nb, d, d) of the piecewise-linear path.
    """

    grid: Grid
    block: int
    delta: np.ndarray
    area: np.ndarray

    @property
    def blocks(self) -> int:
        return self.delta.shape[-2]

    @property
    def coarse_grid(self) -> Grid:
        return self.grid.coarsen(self.block)

    def merge(self) -> AreaProcess:
        """Chen's relation on consecutive pairs of blocks."""

        if self.blocks % 2:
            raise IncompatibleGridError(f"{self.blocks} blocks cannot be paired")

        left, right = self.delta[..., 0::2, :], self.delta[..., 1::2, :]
        area = (
            self.area[..., 0::2, :, :]
            + self.area[..., 1::2, :, :]
            + left[..., :, None] * right[..., None, :]
        )
        return AreaProcess(self.grid, self.block * 2, left + right, area)

    def coarsen(self, factor: int) -> AreaProcess:
        out = self
        while factor > 1:
            if factor % 2:
                raise IncompatibleGridError("area blocks coarsen by powers of two")

            out = out.merge()
            factor //= 2

        return out

    def symmetric_defect(self) -> float:
        """max |Sym(x²) - ½ δx ⊗ δx| over blocks."""

        sym = 0.5 * (self.area + np.swapaxes(self.area, -1, -2))
        half = 0.5 * self.delta[..., :, None] * self.delta[..., None, :]
        return float(np.max(np.abs(sym - half), initial=0.0))

    def block_index(self, t: float) -> int:
        return self.coarse_grid.index_of(t)
