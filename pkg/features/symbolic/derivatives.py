from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

import config
from tools.cache import cache
from tools.parser import Expr, differentiate, lambdify

__all__ = ("partial", "gradient", "hessian", "jacobian", "to_callable")


@cache(maxsize=config.MOMENTS.CACHE_SIZE)
def partial(e: Expr, ks: tuple[int, ...]) -> Expr:
    """∂_{k1} ∂_{k2} ... e, with the indices sorted so mixed partials share entries."""

    if not ks:
        return e

    ks = tuple(sorted(ks))
    return differentiate(partial(e, ks[:-1]), ks[-1])


def gradient(e: Expr, n: int) -> tuple[Expr, ...]:
    return tuple(partial(e, (k,)) for k in range(1, n + 1))


def hessian(e: Expr, n: int) -> tuple[tuple[Expr, ...], ...]:
    return tuple(tuple(partial(e, (i, k)) for k in range(1, n + 1)) for i in range(1, n + 1))


def jacobian(field: Sequence[Expr], n: int) -> tuple[tuple[Expr, ...], ...]:
    """Row i holds the gradient of component i."""

    return tuple(gradient(e, n) for e in field)


def to_callable(e: Expr, *, strict: bool = True) -> Callable[[Sequence[np.ndarray]], np.ndarray]:
    return lambdify(e, strict=strict)
