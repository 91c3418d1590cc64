from __future__ import annotations

from logging import getLogger
from typing import Any, Optional, Sequence

import numpy as np

from features.fbm import AreaProcess, FbmPath, Grid, levy_area
from tools.exceptions import IncompatibleGridError, InputError
from tools.parser import Expr, differentiate, lambdify

from .controlled import ControlledPath

log = getLogger("fracdev/rough")

__all__ = (
    "young_integral",
    "compensated_integral",
    "compensated_terms",
    "refinement_sequence",
    "ito_residual",
    "ito_refinement",
)


def young_integral(
    m: np.ndarray,
    x: np.ndarray,
    grid: Grid,
    s: float = 0.0,
    t: Optional[float] = None,
    *,
    stride: int = 1,
) -> float:
    """Left-point Riemann sum Σ m_{t_k} · (x_{t_{k+1}} - x_{t_k}) on every `stride`-th point."""

    m = np.asarray(m, dtype=float)
    x = np.asarray(x, dtype=float)
    if m.shape[0] != grid.steps + 1 or x.shape[0] != grid.steps + 1:
        raise IncompatibleGridError("integrand and integrator must live on the grid")

    a = grid.index_of(s)
    b = grid.index_of(grid.T if t is None else t)
    if (b - a) % stride:
        raise IncompatibleGridError(f"[{s}, {t}] is not a union of {stride}-step blocks")

    points = np.arange(a, b + 1, stride)
    dx = x[points[1:]] - x[points[:-1]]
    left = m[points[:-1]]
    return float(np.sum(left * dx))


def _check_grids(points: int, area: AreaProcess, x: Optional[FbmPath] = None) -> None:
    if x is not None and (x.grid != area.grid or x.batched):
        raise IncompatibleGridError("area and path come from different grids")

    if points != area.grid.steps + 1:
        raise IncompatibleGridError(
            f"integrand has {points} points, area grid has {area.grid.steps + 1}"
        )


def compensated_terms(v: np.ndarray, mu: np.ndarray, area: AreaProcess) -> np.ndarray:
    """
    Per coarse block starting at s: v_s · δx + Σ_{i,j} μ_s^{j,i} x²(i, j), for an
    integrand v of shape (P, d) with derivative μ of shape (P, d, d).
    """

    starts = np.arange(area.blocks) * area.block
    first = np.einsum("bj,bj->b", v[starts], area.delta)
    second = np.einsum("bji,bij->b", mu[starts], area.area)
    return first + second


def compensated_integral(
    m: ControlledPath,
    x: FbmPath,
    area: AreaProcess,
    s: float,
    t: float,
) -> float:
    """
    ∫_s^t m dx by compensated Riemann sums over the blocks of `area`;
    s and t must be block boundaries.
    """

    if m.z.ndim != 2 or m.z.shape[1] != area.delta.shape[-1]:
        raise InputError("the integrand must be a row vector with one entry per component")

    _check_grids(m.points, area, x)
    a = area.block_index(s)
    b = area.block_index(t)
    if b < a:
        raise InputError("integration bounds are reversed")

    return float(compensated_terms(m.z, m.zeta, area)[a:b].sum())


def refinement_sequence(
    m: ControlledPath,
    x: FbmPath,
    s: float,
    t: float,
    blocks: Sequence[int],
) -> list[dict[str, Any]]:
    """
    The compensated integral at each block size, coarse to fine. `norm` is
    the largest single compensation term and `change` the move from the
    previous resolution.
    """

    records: list[dict[str, Any]] = []
    previous: Optional[float] = None
    for block in sorted(blocks, reverse=True):
        area = levy_area(x, block)
        value = compensated_integral(m, x, area, s, t)
        starts = np.arange(area.blocks) * area.block
        compensation = np.einsum("bji,bij->b", m.zeta[starts], area.area)
        records.append(
            {
                "resolution": area.blocks,
                "value": value,
                "norm": float(np.max(np.abs(compensation), initial=0.0)),
                "change": None if previous is None else abs(value - previous),
            }
        )
        previous = value

    return records


def _ito_terms(
    f: Expr, z: ControlledPath, m: ControlledPath, area: AreaProcess
) -> tuple[np.ndarray, np.ndarray]:
    if z.z.ndim != 2:
        raise InputError("the state path must be vector valued")

    k = z.z.shape[1]
    if m.z.shape != (z.points, k, z.d):
        raise InputError(f"m must have shape {(z.points, k, z.d)}, got {m.z.shape}")

    _check_grids(z.points, area)
    columns = [z.z[:, a] for a in range(k)]
    fz = lambdify(f)(columns)
    grad = np.stack([lambdify(differentiate(f, a + 1))(columns) for a in range(k)], axis=-1)
    hess = np.stack(
        [
            np.stack(
                [lambdify(differentiate(differentiate(f, a + 1), b + 1))(columns) for b in range(k)],
                axis=-1,
            )
            for a in range(k)
        ],
        axis=-2,
    )
    v = np.einsum("pa,paj->pj", grad, m.z)
    mu = np.einsum("pab,paj,pbi->pji", hess, m.z, m.z) + np.einsum("pa,paji->pji", grad, m.zeta)
    compensated = compensated_terms(v, mu, area)
    ends = np.arange(area.blocks + 1) * area.block
    return np.diff(fz[ends]), compensated


def ito_residual(
    f: Expr,
    z: ControlledPath,
    m: ControlledPath,
    x: FbmPath,
    area: AreaProcess,
) -> float:
    """
    sup over block boundaries s < t of |δ(f(z))_{st} - ∫_s^t ∇f(z) m dx|,
    where δz = ∫ m dx and the integral is the compensated sum.
    """

    if x.grid != area.grid:
        raise IncompatibleGridError("area and path come from different grids")

    exact, compensated = _ito_terms(f, z, m, area)
    error = np.concatenate([[0.0], np.cumsum(exact - compensated)])
    return float(error.max() - error.min())


def ito_refinement(
    f: Expr,
    z: ControlledPath,
    m: ControlledPath,
    x: FbmPath,
    blocks: Sequence[int],
) -> list[dict[str, Any]]:
    out = []
    for block in sorted(blocks, reverse=True):
        area = levy_area(x, block)
        out.append({"resolution": area.blocks, "residual": ito_residual(f, z, m, x, area)})

    log.debug(f"Itô residuals: {[r['residual'] for r in out]}")
    return out
