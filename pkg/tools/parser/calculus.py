from __future__ import annotations

from functools import singledispatch
from typing import Callable, Sequence

import numpy as np

from tools.exceptions import ExpressionDomainError

from .nodes import (
    ONE,
    ZERO,
    Add,
    Const,
    Div,
    Expr,
    Func,
    Mul,
    Neg,
    Pow,
    Sub,
    Var,
    add,
    const,
    div,
    func,
    mul,
    neg,
    power,
    sub,
)

__all__ = ("differentiate", "lambdify", "evaluate")

Compiled = Callable[[Sequence[np.ndarray]], np.ndarray]


@singledispatch
def differentiate(e: Expr, i: int) -> Expr:
    """Symbolic partial derivative of `e` with respect to `x{i}`."""

    raise NotImplementedError(f"Cannot differentiate a {type(e).__name__}")


@differentiate.register
def _(e: Const, i: int) -> Expr:
    return ZERO


@differentiate.register
def _(e: Var, i: int) -> Expr:
    return ONE if e.index == i else ZERO


@differentiate.register
def _(e: Neg, i: int) -> Expr:
    return neg(differentiate(e.operand, i))


@differentiate.register
def _(e: Add, i: int) -> Expr:
    return add(differentiate(e.left, i), differentiate(e.right, i))


@differentiate.register
def _(e: Sub, i: int) -> Expr:
    return sub(differentiate(e.left, i), differentiate(e.right, i))


@differentiate.register
def _(e: Mul, i: int) -> Expr:
    return add(
        mul(differentiate(e.left, i), e.right),
        mul(e.left, differentiate(e.right, i)),
    )


@differentiate.register
def _(e: Div, i: int) -> Expr:
    da, db = differentiate(e.left, i), differentiate(e.right, i)
    if db.is_const(0.0):
        return div(da, e.right)

    return div(
        sub(mul(da, e.right), mul(e.left, db)),
        power(e.right, const(2)),
    )


@differentiate.register
def _(e: Pow, i: int) -> Expr:
    base, exponent = e.left, e.right
    da, db = differentiate(base, i), differentiate(exponent, i)
    if db.is_const(0.0):
        return mul(mul(exponent, power(base, sub(exponent, ONE))), da)

    # a^b (b' ln a + b a'/a)
    return mul(
        e,
        add(mul(db, func("ln", base)), div(mul(exponent, da), base)),
    )


@differentiate.register
def _(e: Func, i: int) -> Expr:
    inner = differentiate(e.arg, i)
    if inner.is_const(0.0):
        return ZERO

    a = e.arg
    match e.name:
        case "sin":
            outer = func("cos", a)
        case "cos":
            outer = neg(func("sin", a))
        case "exp":
            outer = e
        case "ln":
            return div(inner, a)
        case "tanh":
            outer = sub(ONE, power(e, const(2)))
        case _:
            raise NotImplementedError(e.name)

    return mul(outer, inner)


_UNARY = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "ln": np.log,
    "tanh": np.tanh,
}
_BINARY = {
    Add: np.add,
    Sub: np.subtract,
    Mul: np.multiply,
    Div: np.divide,
    Pow: np.power,
}


@singledispatch
def _compile(e: Expr) -> Compiled:
    raise NotImplementedError(type(e).__name__)


@_compile.register
def _(e: Const) -> Compiled:
    value = e.value
    return lambda X: value  # type: ignore[return-value]


@_compile.register
def _(e: Var) -> Compiled:
    k = e.index - 1
    return lambda X: X[k]


@_compile.register
def _(e: Neg) -> Compiled:
    inner = _compile(e.operand)
    return lambda X: np.negative(inner(X))


@_compile.register
def _(e: Func) -> Compiled:
    inner, fn = _compile(e.arg), _UNARY[e.name]
    return lambda X: fn(inner(X))


@_compile.register
def _(e: Add) -> Compiled:
    return _binary(e)


@_compile.register
def _(e: Sub) -> Compiled:
    return _binary(e)


@_compile.register
def _(e: Mul) -> Compiled:
    return _binary(e)


@_compile.register
def _(e: Div) -> Compiled:
    return _binary(e)


@_compile.register
def _(e: Pow) -> Compiled:
    base, exponent = _compile(e.left), _compile(e.right)
    if isinstance(e.right, Const) and e.right.value.is_integer():
        k = int(e.right.value)
        if k >= 0:
            return lambda X: np.power(base(X), k)

    return lambda X: np.power(np.asarray(base(X), dtype=float), exponent(X))


def _binary(e: Expr) -> Compiled:
    left, right = _compile(e.left), _compile(e.right)  # type: ignore[attr-defined]
    fn = _BINARY[type(e)]
    return lambda X: fn(left(X), right(X))


def lambdify(e: Expr, *, strict: bool = True) -> Callable[[Sequence[np.ndarray]], np.ndarray]:
    """
    Compile `e` into a numpy callable of the stacked state ``X[k] = x{k+1}``.

    With `strict`, leaving the domain of an operation (log of a non-positive
    number, division by zero, fractional power of a negative base) raises
    :class:`ExpressionDomainError`; otherwise it yields NaN or inf so that a
    batch can flag individual paths.
    """

    compiled = _compile(e)

    def run(X: Sequence[np.ndarray]) -> np.ndarray:
        shape = np.shape(X[0]) if len(X) else ()
        if strict:
            try:
                with np.errstate(invalid="raise", divide="raise", over="ignore"):
                    out = compiled(X)
            except FloatingPointError as exc:
                raise ExpressionDomainError(f"{e} is undefined here: {exc}") from None
        else:
            with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
                out = compiled(X)

        return np.broadcast_to(np.asarray(out, dtype=float), shape).copy()

    return run


def evaluate(e: Expr, point: Sequence[float]) -> float:
    X = [np.float64(v) for v in point]
    if not X:
        X = [np.float64(0.0)]

    return float(lambdify(e)(X))
