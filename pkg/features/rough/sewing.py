from __future__ import annotations

from itertools import combinations
from logging import getLogger
from typing import Optional, Sequence

import numpy as np

import config
from tools.exceptions import IncompatibleGridError, InputError, NotClosedError

from .increments import delta2

log = getLogger("fracdev/rough")

__all__ = ("closedness_defect", "sew", "decompose", "riemann_sums")


def _quadruples(points: int, rng: np.random.Generator) -> np.ndarray:
    if points <= config.ROUGH.DENSE_CHECK_POINTS:
        return np.array(list(combinations(range(points), 4)), dtype=np.intp).reshape(-1, 4)

    draws = rng.integers(0, points, size=(config.ROUGH.SAMPLED_QUADRUPLES, 4))
    draws.sort(axis=1)
    distinct = (np.diff(draws, axis=1) > 0).all(axis=1)
    return draws[distinct]


def closedness_defect(h: np.ndarray, seed: int = 0) -> float:
    """
    max |(δh)_{stuv}| over increasing quadruples: all of them on small grids,
    a random sample otherwise.
    """

    quads = _quadruples(h.shape[0], np.random.default_rng(seed))
    if not len(quads):
        return 0.0

    s, t, u, v = quads.T
    defect = h[t, u, v] - h[s, u, v] + h[s, t, v] - h[s, t, u]
    return float(np.max(np.abs(defect)))


def sew(h: np.ndarray, *, check: bool = True, tol: Optional[float] = None) -> np.ndarray:
    """
    Discrete Λ: the 2-increment g with δg = h that vanishes on neighbouring
    grid points, g_{st} = Σ_{s<u<t} h_{s,u,u+1}. On dyadic intervals it
    telescopes as g_{st} = h_{s,m,t} + g_{sm} + g_{mt} with m the midpoint.
    """

    if h.ndim != 3 or len(set(h.shape)) != 1:
        raise InputError("sewing needs a scalar 3-increment on one grid")

    steps = h.shape[0] - 1
    if steps < 1 or steps & (steps - 1):
        raise IncompatibleGridError(f"sewing runs on dyadic grids, got {steps} steps")

    if check:
        defect = closedness_defect(h)
        scale = max(1.0, float(np.max(np.abs(h))))
        if defect > (config.ROUGH.CLOSED_TOLERANCE if tol is None else tol) * scale:
            raise NotClosedError(defect)

    P = steps + 1
    s = np.arange(P)[:, None]
    u = np.arange(steps)[None, :]
    neighbours = np.where(u > s, h[s, u, u + 1], 0.0)  # a[s, u] = h[s, u, u+1] for u > s
    cumulative = np.concatenate([np.zeros((P, 1)), np.cumsum(neighbours, axis=1)], axis=1)
    # g[s, t] = Σ_{u=s+1}^{t-1} a[s, u] = cumulative[s, t] for t > s
    g = np.triu(cumulative[:, :P], k=1)
    return g


def decompose(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Split a scalar 2-increment as g = δf + Λδg and return (f, Λδg) with f_0 = 0.
    """

    lam = sew(delta2(g), check=False)
    f = (g - lam)[0]
    return f, lam


def riemann_sums(g: np.ndarray, levels: Optional[Sequence[int]] = None) -> list[float]:
    """
    Σ_k g_{t_k t_{k+1}} over the dyadic partitions of the whole grid with
    2^ℓ intervals; the last level is the grid itself and equals (δf)_{0T}.
    """

    steps = g.shape[0] - 1
    if steps < 1 or steps & (steps - 1):
        raise IncompatibleGridError(f"dyadic partitions need 2^j steps, got {steps}")

    top = steps.bit_length() - 1
    out = []
    for level in levels if levels is not None else range(top + 1):
        if not 0 <= level <= top:
            raise InputError(f"level {level} outside 0..{top}")

        points = np.arange(0, steps + 1, steps >> level)
        out.append(float(g[points[:-1], points[1:]].sum()))

    return out
