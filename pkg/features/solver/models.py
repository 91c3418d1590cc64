from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from features.fbm import FbmPath, Grid
from tools.exceptions import IncompatibleGridError

__all__ = ("Trajectory", "VariationalPath", "ConvergenceReport")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Solution states on `grid`, shape (..., n, N + 1), with a leading path
    axis when the driving path is batched. Paths that left the domain or
    the divergence bound are marked in `failed` and hold NaN from then on.
    """

    grid: Grid
    states: np.ndarray
    scheme: str
    path: FbmPath
    failed: np.ndarray = field(default_factory=lambda: np.zeros((), dtype=bool))

    def __post_init__(self) -> None:
        if self.states.shape[-1] != self.grid.steps + 1:
            raise IncompatibleGridError("trajectory does not match its grid")

        self.states.setflags(write=False)

    @property
    def n(self) -> int:
        return self.states.shape[-2]

    @property
    def batched(self) -> bool:
        return self.states.ndim == 3

    @property
    def final(self) -> np.ndarray:
        return self.states[..., -1]

    @property
    def failures(self) -> int:
        return int(np.count_nonzero(self.failed))

    def at(self, t: float) -> np.ndarray:
        return self.states[..., self.grid.index_of(t)]

    def rows(self) -> list[list[float]]:
        if self.batched:
            raise IncompatibleGridError("only single trajectories are written as rows")

        return [[float(t), *map(float, x)] for t, x in zip(self.grid.times, self.states.T)]

    def to_document(self) -> dict[str, Any]:
        return {
            "scheme": self.scheme,
            "steps": self.grid.steps,
            "T": self.grid.T,
            "times": self.grid.times,
            "states": self.states,
            "failures": self.failures,
        }


@dataclass(frozen=True, eq=False)
class VariationalPath:
    """D^j_s X^i_t for every grid time t, shape (..., n, N + 1); zero before s."""

    grid: Grid
    s: float
    j: int
    values: np.ndarray

    def at(self, t: float) -> np.ndarray:
        return self.values[..., self.grid.index_of(t)]


@dataclass(frozen=True)
class ConvergenceReport:
    steps: tuple[int, ...]
    differences: tuple[float, ...]
    rate: Optional[float]

    def to_document(self) -> dict[str, Any]:
        return {"steps": list(self.steps), "differences": list(self.differences), "rate": self.rate}
