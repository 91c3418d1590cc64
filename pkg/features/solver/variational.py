from __future__ import annotations

from logging import getLogger

import numpy as np

from features.symbolic import SdeSpec
from tools.exceptions import (
    ExpressionDomainError,
    IncompatibleGridError,
    InputError,
    UnsupportedRegimeError,
)

from .fields import VectorFields
from .models import Trajectory, VariationalPath

log = getLogger("fracdev/solver")

__all__ = ("variational_path",)


def variational_path(spec: SdeSpec, trajectory: Trajectory, s: float, j: int) -> VariationalPath:
    """
    D^j_s X_t: zero for t < s, σ^{·,j}(X_s) at t = s, then the linear
    equation dD = ∇b(X) D dt + Σ_{j'} ∇σ^{·,j'}(X) D dB^{j'} along the frozen
    trajectory, stepped with the trajectory's own scheme.
    """

    if spec.H <= 0.5:
        raise UnsupportedRegimeError(f"the variational equation is solved for H > 1/2, got {spec.H}")

    if not 1 <= j <= spec.d:
        raise InputError(f"noise component {j} outside 1..{spec.d}")

    path = trajectory.path
    if trajectory.grid != path.grid:
        raise IncompatibleGridError("the trajectory must live on the grid of its driving path")

    grid = trajectory.grid
    start = grid.index_of(s)
    X = trajectory.states
    dB = path.increments
    dt = grid.dt
    heun = trajectory.scheme != "euler"
    fields = VectorFields(spec, strict=not trajectory.batched)

    def linear(state: np.ndarray, D: np.ndarray, inc: np.ndarray) -> np.ndarray:
        drift = np.einsum("...ik,...k->...i", fields.drift_jacobian(state), D) * dt
        noise = np.einsum("...ijk,...k,...j->...i", fields.diffusion_jacobian(state), D, inc)
        return drift + noise

    values = np.zeros(X.shape)
    D = fields.diffusion(X[..., start])[..., j - 1]
    values[..., start] = D
    for k in range(start, grid.steps):
        inc = dB[..., k]
        try:
            first = linear(X[..., k], D, inc)
            if heun:
                predicted = D + first
                D = D + 0.5 * (first + linear(X[..., k + 1], predicted, inc))
            else:
                D = D + first
        except ExpressionDomainError as exc:
            raise ExpressionDomainError(str(exc), step=k) from None

        values[..., k + 1] = D

    log.debug(f"Variational path D^{j}_{s} over {grid.steps - start} steps.")
    return VariationalPath(grid, float(s), j, values)
