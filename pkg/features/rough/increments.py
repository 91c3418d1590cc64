"""
Grid increments. A k-increment on a grid of P points is an array whose
first k axes range over the points; trailing axes hold vector values.
Only ordered tuples t_1 <= ... <= t_k carry meaning.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from tools.exceptions import InputError

__all__ = (
    "coboundary",
    "delta1",
    "delta2",
    "join",
    "iterated_sum",
    "ordered",
    "holder_seminorm",
    "dyadic_holder_seminorm",
    "dyadic_holder_seminorm3",
)


def coboundary(g: np.ndarray, order: Optional[int] = None) -> np.ndarray:
    """
    (δg)_{t_1 ... t_{k+1}} = Σ_i (-1)^{k-i} g_{t_1 ... t̂_i ... t_{k+1}}.

    For a path, (δg)_{st} = g_t - g_s; for a 2-increment,
    (δh)_{sut} = h_{st} - h_{su} - h_{ut}.
    """

    k = g.ndim if order is None else order
    if k < 1 or k > g.ndim:
        raise InputError(f"cannot take the coboundary of a {k}-increment with {g.ndim} axes")

    out = None
    for i in range(1, k + 2):
        term = np.expand_dims(g, i - 1)
        term = term if (k - i) % 2 == 0 else -term
        out = term if out is None else out + term

    return out  # type: ignore[return-value]


def delta1(g: np.ndarray) -> np.ndarray:
    return coboundary(g, 1)


def delta2(h: np.ndarray) -> np.ndarray:
    return coboundary(h, 2)


def join(g: np.ndarray, h: np.ndarray, g_order: int, h_order: int) -> np.ndarray:
    """
    Scalar product of increments sharing their middle time:
    (gh)_{t_1 ... t_{n+m-1}} = g_{t_1 ... t_n} h_{t_n ... t_{n+m-1}}.
    """

    if g.ndim != g_order or h.ndim != h_order:
        raise InputError("join multiplies scalar-valued increments")

    g = g.reshape(g.shape + (1,) * (h_order - 1))
    h = h.reshape((1,) * (g_order - 1) + h.shape)
    return g * h


def iterated_sum(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """
    Discrete 𝒥(df dg): the 2-increment Σ_{s <= k < t} (f_k - f_s)(g_{k+1} - g_k).
    Its coboundary is exactly (δf)_{su} (δg)_{ut}.
    """

    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    dg = np.diff(g)
    # F[t] = Σ_{k<t} f_k dg_k
    F = np.concatenate([[0.0], np.cumsum(f[:-1] * dg)])
    out = (F[None, :] - F[:, None]) - f[:, None] * (g[None, :] - g[:, None])
    return np.triu(out)


def ordered(points: int, order: int) -> np.ndarray:
    """Boolean mask of strictly increasing index tuples."""

    idx = np.indices((points,) * order)
    mask = np.ones((points,) * order, dtype=bool)
    for a, b in zip(idx, idx[1:]):
        mask &= a < b

    return mask


def _magnitude(h: np.ndarray, order: int) -> np.ndarray:
    if h.ndim == order:
        return np.abs(h)

    return np.linalg.norm(h.reshape(h.shape[:order] + (-1,)), axis=-1)


def holder_seminorm(h: np.ndarray, mu: float, times: np.ndarray) -> float:
    """Grid sup of |h_{st}| / |t - s|^μ over s < t."""

    if mu <= 0:
        raise InputError("Hölder exponent must be positive")

    times = np.asarray(times, dtype=float)
    gap = np.abs(times[None, :] - times[:, None])
    mask = ordered(times.size, 2)
    if not mask.any():
        return 0.0

    return float((_magnitude(h, 2)[mask] / gap[mask] ** mu).max())


def _dyadic_levels(points: int) -> list[int]:
    steps = points - 1
    if steps < 1 or steps & (steps - 1):
        raise InputError(f"dyadic seminorms need 2^j + 1 points, got {points}")

    return [1 << j for j in range(steps.bit_length())]


def dyadic_holder_seminorm(h: np.ndarray, mu: float, times: np.ndarray) -> float:
    """Like :func:`holder_seminorm`, restricted to dyadic intervals [k 2^j, (k+1) 2^j]."""

    times = np.asarray(times, dtype=float)
    mag = _magnitude(h, 2)
    best = 0.0
    for width in _dyadic_levels(times.size):
        s = np.arange(0, times.size - width, width)
        t = s + width
        best = max(best, float((mag[s, t] / (times[t] - times[s]) ** mu).max()))

    return best


def dyadic_holder_seminorm3(
    h: np.ndarray, rho: float, mu: float, times: np.ndarray
) -> float:
    """Midpoint triples (s, (s+t)/2, t) of dyadic intervals of width at least two steps."""

    times = np.asarray(times, dtype=float)
    mag = _magnitude(h, 3)
    best = 0.0
    for width in _dyadic_levels(times.size)[1:]:
        s = np.arange(0, times.size - width, width)
        u = s + width // 2
        t = s + width
        weight = (times[u] - times[s]) ** rho * (times[t] - times[u]) ** (mu - rho)
        best = max(best, float((mag[s, u, t] / weight).max()))

    return best
