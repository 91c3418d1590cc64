from __future__ import annotations

import numpy as np

from tools.exceptions import IncompatibleGridError

from .models import AreaProcess, FbmPath

__all__ = ("levy_area", "block_area")


def block_area(values: np.ndarray, block: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Increments and iterated integrals of the piecewise-linear interpolation
    of `values` (..., d, N + 1) over consecutive blocks of `block` steps:

        x²_{st}(i, j) = Σ_k (x^i_k - x^i_s) Δ^j_k + ½ Δ^i_k Δ^j_k
    """

    steps = values.shape[-1] - 1
    if block < 1 or steps % block:
        raise IncompatibleGridError(f"block of {block} steps does not divide {steps}")

    nb = steps // block
    x = np.moveaxis(values, -1, -2)  # (..., N + 1, d)
    dx = np.diff(x, axis=-2)
    lead = x.shape[:-2]
    d = x.shape[-1]
    fine = dx.reshape(*lead, nb, block, d)
    start = x[..., :-1:block, :][..., :nb, :]
    offset = x[..., :-1, :].reshape(*lead, nb, block, d) - start[..., None, :]
    area = np.einsum("...ki,...kj->...ij", offset, fine) + 0.5 * np.einsum(
        "...ki,...kj->...ij", fine, fine
    )
    return fine.sum(axis=-2), area


def levy_area(path: FbmPath, block: int = 1) -> AreaProcess:
    delta, area = block_area(path.values, block)
    return AreaProcess(path.grid, block, delta, area)
