from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

from tools.exceptions import InputError

__all__ = ("iterated_integral",)


def iterated_integral(
    values: np.ndarray,
    alpha: Sequence[int],
    dt: float,
    *,
    start: int = 0,
    stop: Optional[int] = None,
    weight: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    ∫_{start < t_1 < ... < t_m < stop} dB^{α_1}_{t_1} ... dB^{α_m}_{t_m} of the
    piecewise-linear interpolation of `values` (..., d, N + 1), letter 0
    standing for time. Computed with Chen's relation segment by segment,
    which is exact for piecewise-linear paths.

    `weight` (..., N + 1), when given, multiplies the innermost integrand by
    g(X_{t_1}), frozen at the left end of each segment.
    """

    alpha = tuple(alpha)
    stop = values.shape[-1] - 1 if stop is None else stop
    if not 0 <= start <= stop < values.shape[-1]:
        raise InputError(f"window [{start}, {stop}] outside the grid")

    d = values.shape[-2]
    if any(a < 0 or a > d for a in alpha):
        raise InputError(f"word {alpha} uses letters beyond {d}")

    lead = values.shape[:-2]
    m = len(alpha)
    if m == 0:
        return np.ones(lead)

    dx = np.diff(values[..., start : stop + 1], axis=-1)
    steps = dx.shape[-1]
    letters = [np.full(lead + (steps,), dt) if a == 0 else dx[..., a - 1, :] for a in alpha]
    g = None if weight is None else weight[..., start:stop]

    # prefix[r] holds the integral of α_1..α_r over [start, t_k].
    prefix = [np.ones(lead)] + [np.zeros(lead) for _ in range(m)]
    for k in range(steps):
        step = [letter[..., k] for letter in letters]
        for r in range(m, 0, -1):
            acc = prefix[r]
            tail = np.ones(lead)
            for i in range(r - 1, -1, -1):
                tail = tail * step[i]
                term = tail / math.factorial(r - i)
                base = prefix[i]
                if i == 0 and g is not None:
                    base = g[..., k]

                acc = acc + base * term

            prefix[r] = acc

    return prefix[m]
