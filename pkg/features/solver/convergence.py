from __future__ import annotations

from logging import getLogger
from typing import Optional, Sequence

import numpy as np
from scipy.stats import linregress

from features.fbm import Grid, sample, subsample
from features.symbolic import SdeSpec
from tools.exceptions import InputError

from .models import ConvergenceReport
from .schemes import Scheme, solve

log = getLogger("fracdev/solver")

__all__ = ("self_convergence",)


def self_convergence(
    spec: SdeSpec,
    steps: Sequence[int],
    seed: int = 0,
    *,
    H: Optional[float] = None,
    scheme: Optional[Scheme] = None,
) -> ConvergenceReport:
    """
    Solve one sample at every resolution in `steps` (each the double of the
    previous) and fit log sup|X_N - X_{2N}| against log(1/N). The sample is
    drawn once on the finest grid and subsampled, so all resolutions see the
    same noise.
    """

    if H is not None:
        spec = spec.replace(H=H)

    steps = sorted(steps)
    if len(steps) < 2 or any(b != 2 * a for a, b in zip(steps, steps[1:])):
        raise InputError("resolutions must double from one to the next")

    finest = sample(spec.H, Grid(spec.T, steps[-1]), spec.d, seed)
    trajectories = [solve(spec, subsample(finest, steps[-1] // n), scheme) for n in steps]
    differences = tuple(
        float(np.max(np.abs(fine.states[..., ::2] - coarse.states)))
        for coarse, fine in zip(trajectories, trajectories[1:])
    )

    usable = [(n, diff) for n, diff in zip(steps, differences) if diff > 0]
    rate = None
    if len(usable) >= 2:
        fit = linregress(np.log([n for n, _ in usable]), -np.log([diff for _, diff in usable]))
        rate = float(fit.slope)

    log.debug(f"Self-convergence differences {differences}, rate {rate}.")
    return ConvergenceReport(tuple(steps), differences, rate)
