from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from tools.parser import evaluate

from .derivatives import gradient, hessian, jacobian
from .spec import SdeSpec

__all__ = ("second_order_closed_form",)


def _values(exprs, point) -> np.ndarray:
    return np.array([evaluate(e, point) for e in exprs])


def second_order_closed_form(
    spec: SdeSpec,
    a: Optional[Sequence[float]] = None,
    t: Optional[float] = None,
) -> dict[tuple[int, int], float]:
    """
    Coefficients of the expansion up to m = 2, computed from derivatives
    without going through trees or words. Keys are (n, m') for the power
    t^{nH + m'}:

        (0, 0)  f
        (0, 1)  f'(b)
        (2, 0)  ½ Σ_j [f''(σ^j, σ^j) + f'(σ^j' σ^j)]
        (0, 2)  ½ [f''(b, b) + f'(b' b)]

    With `t` the returned values are the terms themselves.
    """

    point = tuple(spec.a if a is None else a)
    n = spec.n
    df = _values(gradient(spec.f, n), point)
    d2f = np.array([_values(row, point) for row in hessian(spec.f, n)])

    def second(field) -> float:
        v = _values(field, point)
        dv = np.array([_values(row, point) for row in jacobian(field, n)])
        return 0.5 * float(v @ d2f @ v + df @ (dv @ v))

    b = _values(spec.drift, point)
    out = {
        (0, 0): evaluate(spec.f, point),
        (0, 1): float(df @ b),
        (2, 0): sum(second(spec.column(j)) for j in range(1, spec.d + 1)),
        (0, 2): second(spec.drift),
    }
    if t is not None:
        out = {(k, m): c * t ** (k * spec.H + m) for (k, m), c in out.items()}

    return out
