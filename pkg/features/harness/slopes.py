from __future__ import annotations

import math
from dataclasses import dataclass, field
from logging import getLogger
from typing import Any, Literal, Optional, Sequence

import numpy as np
from scipy.stats import linregress

import config
from features.expansion import Expansion, evaluate, expand
from features.fbm import FbmPath, Grid, iter_batches
from features.moments import MultiIndex
from features.rough import iterated_integral
from features.solver import solve_rough
from features.symbolic import McConfig, SdeSpec
from tools.exceptions import InputError, SignalBelowNoiseError, UnsupportedRegimeError
from tools.parser import Expr, lambdify

from .estimate import McEstimate, Moments, map_batches, mc_estimate

log = getLogger("fracdev/harness")

__all__ = (
    "SlopeFit",
    "fit_slope",
    "check_time_grid",
    "remainder_slope",
    "iterated_integral_remainder_slope",
)

Status = Literal["ok", "inconclusive"]


@dataclass(frozen=True)
class SlopeFit:
    """
    Least-squares slope of log |value| against log t over the points whose
    value stands above `sigmas` standard errors.
    """

    slope: Optional[float]
    target: float
    status: Status
    used: tuple[float, ...]
    rows: tuple[dict[str, float], ...] = field(default=())

    def meets(self, slack: float) -> bool:
        """True when inconclusive or when the slope is at least target - slack."""

        if self.slope is None:
            return self.status == "inconclusive"

        return self.slope >= self.target - slack

    def within(self, slack: float) -> bool:
        return self.slope is not None and abs(self.slope - self.target) <= slack

    def to_document(self) -> dict[str, Any]:
        return {
            "slope": self.slope,
            "target": self.target,
            "status": self.status,
            "used": list(self.used),
            "rows": list(self.rows),
        }


def check_time_grid(t_grid: Sequence[float], minimum: int = 5) -> tuple[float, ...]:
    times = tuple(sorted({float(t) for t in t_grid}, reverse=True))
    if len(times) < minimum or times[-1] <= 0:
        raise InputError(f"slope fits need at least {minimum} distinct positive times")

    return times


def fit_slope(
    times: Sequence[float],
    values: Sequence[float],
    noise: Sequence[float],
    *,
    target: float,
    sigmas: Optional[float] = None,
    strict: bool = False,
) -> SlopeFit:
    sigmas = config.HARNESS.NOISE_SIGMAS if sigmas is None else sigmas
    rows = tuple({"t": t, "value": v, "noise": e} for t, v, e in zip(times, values, noise))
    kept = [
        (t, abs(v))
        for t, v, e in zip(times, values, noise)
        if abs(v) > 0 and abs(v) >= sigmas * e
    ]
    if len(kept) < config.HARNESS.MIN_SLOPE_POINTS:
        if strict:
            raise SignalBelowNoiseError(
                f"only {len(kept)} of {len(rows)} points stand above {sigmas} standard errors"
            )

        log.info(f"Slope fit inconclusive: {len(kept)} usable points.")
        return SlopeFit(None, target, "inconclusive", tuple(t for t, _ in kept), rows)

    fit = linregress(np.log([t for t, _ in kept]), np.log([v for _, v in kept]))
    return SlopeFit(float(fit.slope), target, "ok", tuple(t for t, _ in kept), rows)


def remainder_slope(
    spec: SdeSpec,
    order: int,
    t_grid: Sequence[float],
    cfg: McConfig,
    *,
    mc: Optional[McEstimate] = None,
    expansion: Optional[Expansion] = None,
    threads: int = 1,
    strict: bool = False,
) -> SlopeFit:
    """
    Decay of |E f(X_t) - expansion_m(t)| as t -> 0, compared with (m + 1) H.
    The noise of each point combines the Monte Carlo standard error with the
    error bars of simulated moments.
    """

    times = check_time_grid(t_grid)
    mc = mc or mc_estimate(spec, cfg, t_values=times, threads=threads)
    expansion = expansion or expand(spec, order, seed=cfg.seed, threads=threads)
    if expansion.order != order:
        expansion = expansion.truncate(order)

    remainders = []
    noise = []
    for t in times:
        point = mc.at(t)
        remainders.append(point.mean - evaluate(expansion, t))
        moment_noise = math.fsum(
            abs(term.coefficient) * term.moment_error * t**term.exponent for term in expansion.terms
        )
        noise.append(math.hypot(point.stderr, moment_noise))

    return fit_slope(times, remainders, noise, target=(order + 1) * spec.H, strict=strict)


def iterated_integral_remainder_slope(
    alpha: Sequence[int] | MultiIndex,
    g: Expr,
    spec: SdeSpec,
    t_grid: Sequence[float],
    *,
    paths: int = 20_000,
    steps: int = 64,
    seed: int = 0,
    threads: int = 1,
    strict: bool = False,
) -> SlopeFit:
    """
    Decay of E|∫_{Δ^r([0, t])} g(X) dB^{α_r} ... dB^{α_1}| against
    r - |α| (1 - H), with g frozen at the innermost time and X solved with
    the area scheme on the same sample.
    """

    word = alpha if isinstance(alpha, MultiIndex) else MultiIndex.of(alpha)
    if spec.H > 0.5:
        raise UnsupportedRegimeError(f"this decay test covers 1/3 < H <= 1/2, got {spec.H}")

    if max(word.word, default=0) > spec.d:
        raise InputError(f"word {word} uses letters beyond d = {spec.d}")

    times = check_time_grid(t_grid)
    constant = g.is_const()
    weight_fn = lambdify(g, strict=False)
    means = []
    errors = []
    for t in times:
        grid = Grid(t, steps)

        def run(values: np.ndarray) -> Moments:
            weight = None
            if not constant:
                trajectory = solve_rough(spec, FbmPath(grid, values, spec.H, seed), strict=False)
                weight = weight_fn([trajectory.states[:, k, :] for k in range(spec.n)])

            out = iterated_integral(values, word.word, grid.dt, weight=weight)
            if constant:
                out = out * float(weight_fn([np.zeros(1)] * spec.n)[0])

            return Moments.of(np.abs(out[np.isfinite(out)]))

        batches = iter_batches(spec.H, grid, spec.d, paths, seed, stream=f"iterated:{t!r}")
        moments = Moments.combine(map_batches(run, batches, threads))
        means.append(moments.mean)
        errors.append(moments.stderr)

    target = word.length - word.norm * (1 - spec.H)
    return fit_slope(times, means, errors, target=target, strict=strict)
