from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from logging import getLogger
from typing import Any, Callable, Iterable, Optional, Sequence, TypeVar

import numpy as np
from boltons.iterutils import chunked_iter

import config
from features.fbm import FbmPath, Grid, iter_batches, levy_area
from features.solver import solve
from features.symbolic import McConfig, SdeSpec
from tools import capture_time
from tools.exceptions import InputError, McFailureError
from tools.parser import Expr, lambdify

log = getLogger("fracdev/harness")

__all__ = ("McPoint", "McEstimate", "Moments", "mc_estimate", "map_batches")

T = TypeVar("T")


@dataclass(frozen=True, slots=True)
class Moments:
    """Running count, sum and sum of squares of per-path values."""

    count: int = 0
    total: float = 0.0
    squares: float = 0.0

    @classmethod
    def of(cls, values: np.ndarray) -> Moments:
        values = values.ravel()
        return cls(int(values.size), math.fsum(values), math.fsum(values * values))

    @classmethod
    def combine(cls, parts: Iterable[Moments]) -> Moments:
        parts = list(parts)
        return cls(
            sum(p.count for p in parts),
            math.fsum(p.total for p in parts),
            math.fsum(p.squares for p in parts),
        )

    @property
    def mean(self) -> float:
        return self.total / self.count if self.count else math.nan

    @property
    def stderr(self) -> float:
        if self.count < 2:
            return 0.0

        var = max(self.squares / self.count - self.mean**2, 0.0) * self.count / (self.count - 1)
        return math.sqrt(var / self.count)


@dataclass(frozen=True, slots=True)
class McPoint:
    t: float
    mean: float
    stderr: float
    paths: int
    failed: int

    def to_document(self) -> dict[str, Any]:
        return {
            "t": self.t,
            "mean": self.mean,
            "stderr": self.stderr,
            "paths": self.paths,
            "failed": self.failed,
        }


@dataclass(frozen=True)
class McEstimate:
    points: tuple[McPoint, ...]
    scheme: str
    seed: int

    def at(self, t: float) -> McPoint:
        for point in self.points:
            if math.isclose(point.t, t, rel_tol=1e-12, abs_tol=1e-15):
                return point

        raise InputError(f"no estimate at t = {t}")

    def to_document(self) -> dict[str, Any]:
        return {
            "scheme": self.scheme,
            "seed": self.seed,
            "points": [p.to_document() for p in self.points],
        }


def map_batches(
    fn: Callable[[np.ndarray], T], batches: Iterable[np.ndarray], threads: int = 1
) -> list[T]:
    """Apply `fn` to every batch, `threads` batches at a time, in batch order."""

    if threads <= 1:
        return [fn(batch) for batch in batches]

    out: list[T] = []
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for window in chunked_iter(batches, threads):
            out.extend(pool.map(fn, window))

    return out


def _estimate_at(
    spec: SdeSpec, cfg: McConfig, f: Expr, t: float, threads: int
) -> McPoint:
    scheme = cfg.resolved_scheme(spec.H)
    refine = cfg.area_refinement if scheme == "rough" else 1
    grid = Grid(t, cfg.steps * refine)
    observe = lambdify(f, strict=False)

    def run(values: np.ndarray) -> tuple[Moments, int]:
        path = FbmPath(grid, values, spec.H, cfg.seed)
        area = levy_area(path, refine) if scheme == "rough" else None
        trajectory = solve(spec, path, scheme, area, strict=False)
        final = trajectory.final
        y = observe([final[:, k] for k in range(spec.n)])
        bad = trajectory.failed | ~np.isfinite(y)
        return Moments.of(y[~bad]), int(np.count_nonzero(bad))

    batches = iter_batches(
        spec.H, grid, spec.d, cfg.paths, cfg.seed, stream=f"mc:{t!r}", batch_size=cfg.batch_size
    )
    results = map_batches(run, batches, threads)
    moments = Moments.combine(m for m, _ in results)
    failed = sum(bad for _, bad in results)
    if failed:
        log.warning(f"{failed} of {cfg.paths} paths failed at t = {t}.")

    if failed > config.HARNESS.FAILURE_RATE * cfg.paths:
        raise McFailureError(failed, cfg.paths)

    return McPoint(t, moments.mean, moments.stderr, moments.count, failed)


def mc_estimate(
    spec: SdeSpec,
    cfg: McConfig,
    *,
    f: Optional[Expr] = None,
    t_values: Optional[Sequence[float]] = None,
    threads: int = 1,
) -> McEstimate:
    """
    Mean and standard error of f(X_t) over independent paths, for every t.
    Each t is simulated on its own grid of cfg.steps steps over [0, t]
    with seeds derived from the master seed, the time and the batch index.
    """

    times = tuple(t_values or cfg.t_values or (spec.T,))
    if any(not 0 < t <= spec.T for t in times):
        raise InputError(f"times {times} must lie in (0, {spec.T}]")

    f = spec.f if f is None else f
    with capture_time(f"Monte Carlo over {cfg.paths} paths at {len(times)} times", log):
        points = tuple(_estimate_at(spec, cfg, f, t, threads) for t in times)

    return McEstimate(points, cfg.resolved_scheme(spec.H), cfg.seed)
