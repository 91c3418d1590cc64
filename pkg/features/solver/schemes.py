from __future__ import annotations

import math
from logging import getLogger
from typing import Callable, Literal, Optional

import numpy as np

import config
from features.fbm import AreaProcess, FbmPath, Grid, levy_area
from features.symbolic import SdeSpec
from tools import capture_time
from tools.exceptions import (
    ExpressionDomainError,
    IncompatibleGridError,
    InputError,
    SolverDivergenceError,
    UnsupportedRegimeError,
)

from .fields import VectorFields
from .models import Trajectory

log = getLogger("fracdev/solver")

__all__ = ("Scheme", "solve_young", "solve_rough", "solve", "default_scheme", "march")

Scheme = Literal["euler", "heun", "rough"]
Step = Callable[[np.ndarray, int], np.ndarray]


def default_scheme(H: float) -> Scheme:
    return "heun" if H > 0.5 else "rough"


def _check_path(spec: SdeSpec, path: FbmPath) -> None:
    if path.d != spec.d:
        raise InputError(f"path has {path.d} components, the spec needs {spec.d}")

    if not math.isclose(path.H, spec.H, rel_tol=0, abs_tol=1e-12):
        raise InputError(f"path was sampled with H={path.H}, the spec has H={spec.H}")


def march(
    spec: SdeSpec,
    lead: tuple[int, ...],
    steps: int,
    step: Step,
    *,
    strict: bool,
    bound: Optional[float] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Run `step` from the initial point. Returns states (..., n, steps + 1)
    and the per-path failure mask. In strict mode the first failure raises.
    """

    bound = config.SOLVER.DIVERGENCE_BOUND if bound is None else bound
    states = np.empty(lead + (spec.n, steps + 1))
    X = np.broadcast_to(spec.point, lead + (spec.n,)).copy()
    states[..., 0] = X
    failed = np.zeros(lead, dtype=bool)
    for k in range(steps):
        try:
            X = step(X, k)
        except ExpressionDomainError as exc:
            raise ExpressionDomainError(str(exc), step=k) from None

        size = np.max(np.abs(X), axis=-1)
        bad = ~np.isfinite(size) | (size > bound)
        if np.any(bad & ~failed):
            if strict:
                worst = np.where(np.isfinite(size), size, np.inf)
                raise SolverDivergenceError(k + 1, float(np.max(worst)))

            failed |= bad
            X[failed] = np.nan

        states[..., k + 1] = X

    return states, failed


def _resolve_strict(path: FbmPath, strict: Optional[bool]) -> bool:
    return not path.batched if strict is None else strict


def solve_young(
    spec: SdeSpec,
    path: FbmPath,
    scheme: Literal["euler", "heun"] = "heun",
    *,
    strict: Optional[bool] = None,
) -> Trajectory:
    """
    Euler: X_{k+1} = X_k + b(X_k) Δt + σ(X_k) ΔB_k.
    Heun: the same step as predictor, then the trapezoidal average of both
    coefficient evaluations in both terms.
    """

    if spec.H <= 0.5:
        raise UnsupportedRegimeError(f"Young schemes need H > 1/2, got {spec.H}")

    if scheme not in ("euler", "heun"):
        raise InputError(f"unknown Young scheme {scheme!r}")

    _check_path(spec, path)
    strict = _resolve_strict(path, strict)
    fields = VectorFields(spec, strict=strict)
    dt = path.grid.dt
    dB = path.increments

    def step(X: np.ndarray, k: int) -> np.ndarray:
        inc = dB[..., k]
        b0 = fields.drift(X)
        s0 = fields.diffusion(X)
        Y = X + b0 * dt + np.einsum("...ij,...j->...i", s0, inc)
        if scheme == "euler":
            return Y

        b1 = fields.drift(Y)
        s1 = fields.diffusion(Y)
        return X + 0.5 * (b0 + b1) * dt + 0.5 * np.einsum("...ij,...j->...i", s0 + s1, inc)

    with capture_time(f"Solved with {scheme} on {path.grid}", log):
        states, failed = march(spec, path.values.shape[:-2], path.grid.steps, step, strict=strict)

    return Trajectory(path.grid, states, scheme, path, failed)


def solve_rough(
    spec: SdeSpec,
    path: FbmPath,
    area: Optional[AreaProcess] = None,
    *,
    strict: Optional[bool] = None,
) -> Trajectory:
    """
    Area-corrected step over the blocks of `area`:

        X_{k+1} = X_k + b Δt + σ δx + Σ ∂_{k'}σ^{i,j} σ^{k',j'} x²(j', j)

    with all coefficients at X_k. The trajectory lives on the coarse grid
    of the area blocks.
    """

    _check_path(spec, path)
    area = levy_area(path, 1) if area is None else area
    if area.grid != path.grid:
        raise IncompatibleGridError("area was built on a different grid")

    strict = _resolve_strict(path, strict)
    fields = VectorFields(spec, strict=strict)
    grid: Grid = area.coarse_grid
    dt = grid.dt

    def step(X: np.ndarray, k: int) -> np.ndarray:
        inc = area.delta[..., k, :]
        s0 = fields.diffusion(X)
        Y = X + fields.drift(X) * dt + np.einsum("...ij,...j->...i", s0, inc)
        correction = np.einsum(
            "...ijk,...kl,...lj->...i", fields.diffusion_jacobian(X), s0, area.area[..., k, :, :]
        )
        return Y + correction

    with capture_time(f"Solved with the area scheme on {grid}", log):
        states, failed = march(spec, path.values.shape[:-2], area.blocks, step, strict=strict)

    return Trajectory(grid, states, "rough", path, failed)


def solve(
    spec: SdeSpec,
    path: FbmPath,
    scheme: Optional[Scheme] = None,
    area: Optional[AreaProcess] = None,
    *,
    strict: Optional[bool] = None,
) -> Trajectory:
    scheme = scheme or default_scheme(spec.H)
    if scheme == "rough":
        return solve_rough(spec, path, area, strict=strict)

    if scheme not in config.SOLVER.SCHEMES:
        raise InputError(f"unknown scheme {scheme!r}, expected one of {config.SOLVER.SCHEMES}")

    return solve_young(spec, path, scheme, strict=strict)
