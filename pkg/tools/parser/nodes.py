"""
Expression trees for the scalar expressions that define drift, diffusion
and test functions.

Nodes are immutable and compare structurally. Always build them through
the smart constructors at the bottom of this module; they fold constants
and absorb zeros and ones so that derivatives stay small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, ClassVar, Iterator, Union

from tools.exceptions import ExpressionDomainError

__all__ = (
    "Expr",
    "Const",
    "Var",
    "Neg",
    "Func",
    "BinOp",
    "Add",
    "Sub",
    "Mul",
    "Div",
    "Pow",
    "FUNCTIONS",
    "const",
    "var",
    "neg",
    "func",
    "add",
    "sub",
    "mul",
    "div",
    "power",
    "ZERO",
    "ONE",
)

FUNCTIONS = ("sin", "cos", "exp", "ln", "tanh")

Number = Union[int, float]


class Expr:
    """Base class of every expression node."""

    precedence: ClassVar[int] = 5

    def children(self) -> tuple[Expr, ...]:
        return ()

    def walk(self) -> Iterator[Expr]:
        yield self
        for child in self.children():
            yield from child.walk()

    def variables(self) -> frozenset[int]:
        return frozenset(node.index for node in self.walk() if isinstance(node, Var))

    def is_const(self, value: float | None = None) -> bool:
        return isinstance(self, Const) and (value is None or self.value == value)

    def is_bounded(self) -> bool:
        """
        Conservative check used to warn about expressions that may grow without
        bound (the expansion assumes bounded coefficients).
        """

        return _bounded(self)

    def _wrap(self, child: Expr, strict: bool) -> str:
        text = str(child)
        prec = child.precedence
        if prec < self.precedence or (strict and prec == self.precedence):
            return f"({text})"

        return text


@dataclass(frozen=True, slots=True)
class Const(Expr):
    value: float

    @property
    def precedence(self) -> int:  # type: ignore[override]
        return 3 if self.value < 0 else 5

    def __str__(self) -> str:
        v = self.value
        if math.isfinite(v) and v.is_integer() and abs(v) < 1e15:
            return str(int(v))

        return repr(v)


@dataclass(frozen=True, slots=True)
class Var(Expr):
    index: int

    def __str__(self) -> str:
        return f"x{self.index}"


@dataclass(frozen=True, slots=True)
class Neg(Expr):
    operand: Expr
    precedence: ClassVar[int] = 3

    def children(self) -> tuple[Expr, ...]:
        return (self.operand,)

    def __str__(self) -> str:
        return "-" + self._wrap(self.operand, strict=False)


@dataclass(frozen=True, slots=True)
class Func(Expr):
    name: str
    arg: Expr

    def children(self) -> tuple[Expr, ...]:
        return (self.arg,)

    def __str__(self) -> str:
        return f"{self.name}({self.arg})"


@dataclass(frozen=True, slots=True)
class BinOp(Expr):
    left: Expr
    right: Expr
    symbol: ClassVar[str] = "?"
    spaced: ClassVar[bool] = False

    def children(self) -> tuple[Expr, ...]:
        return (self.left, self.right)

    def __str__(self) -> str:
        sep = f" {self.symbol} " if self.spaced else self.symbol
        return self._wrap(self.left, strict=False) + sep + self._wrap(self.right, strict=True)


@dataclass(frozen=True, slots=True)
class Add(BinOp):
    symbol: ClassVar[str] = "+"
    spaced: ClassVar[bool] = True
    precedence: ClassVar[int] = 1


@dataclass(frozen=True, slots=True)
class Sub(BinOp):
    symbol: ClassVar[str] = "-"
    spaced: ClassVar[bool] = True
    precedence: ClassVar[int] = 1


@dataclass(frozen=True, slots=True)
class Mul(BinOp):
    symbol: ClassVar[str] = "*"
    precedence: ClassVar[int] = 2


@dataclass(frozen=True, slots=True)
class Div(BinOp):
    symbol: ClassVar[str] = "/"
    precedence: ClassVar[int] = 2


@dataclass(frozen=True, slots=True)
class Pow(BinOp):
    symbol: ClassVar[str] = "^"
    precedence: ClassVar[int] = 4

    def __str__(self) -> str:
        # right associative: the base needs parentheses at equal precedence,
        # the exponent never does
        return self._wrap(self.left, strict=True) + "^" + self._wrap(self.right, strict=False)


ZERO = Const(0.0)
ONE = Const(1.0)


def _bounded(e: Expr) -> bool:
    if isinstance(e, Const):
        return True

    if isinstance(e, Var):
        return False

    if isinstance(e, Func):
        return e.name in ("sin", "cos", "tanh") or (e.name == "exp" and _bounded(e.arg))

    if isinstance(e, Neg):
        return _bounded(e.operand)

    if isinstance(e, (Add, Sub, Mul)):
        return _bounded(e.left) and _bounded(e.right)

    if isinstance(e, Pow):
        exponent = e.right
        return (
            isinstance(exponent, Const)
            and exponent.value >= 0
            and exponent.value.is_integer()
            and _bounded(e.left)
        )

    return False


def const(value: Number) -> Const:
    return Const(float(value))


def var(index: int) -> Var:
    return Var(index)


def neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)

    if isinstance(a, Neg):
        return a.operand

    return Neg(a)


def _fold(text: str, compute: Callable[[], float]) -> Const:
    try:
        return Const(compute())
    except OverflowError:
        raise ExpressionDomainError(f"{text} overflows a double") from None


_FOLD = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "tanh": math.tanh,
}


def func(name: str, a: Expr) -> Expr:
    if isinstance(a, Const):
        if name in _FOLD:
            return _fold(f"{name}({a.value!r})", lambda: _FOLD[name](a.value))

        if name == "ln" and a.value > 0:
            return Const(math.log(a.value))

    return Func(name, a)


def add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)

    if a.is_const(0.0):
        return b

    if b.is_const(0.0):
        return a

    if isinstance(b, Neg):
        return sub(a, b.operand)

    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)

    if b.is_const(0.0):
        return a

    if a.is_const(0.0):
        return neg(b)

    return Sub(a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)

    if a.is_const(0.0) or b.is_const(0.0):
        return ZERO

    if a.is_const(1.0):
        return b

    if b.is_const(1.0):
        return a

    if a.is_const(-1.0):
        return neg(b)

    if b.is_const(-1.0):
        return neg(a)

    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0.0:
        return Const(a.value / b.value)

    if b.is_const(1.0):
        return a

    if a.is_const(0.0) and not b.is_const(0.0):
        return ZERO

    return Div(a, b)


def power(a: Expr, b: Expr) -> Expr:
    if b.is_const(0.0):
        return ONE

    if b.is_const(1.0):
        return a

    if isinstance(a, Const) and isinstance(b, Const):
        if a.value > 0 or (b.value.is_integer() and (a.value != 0 or b.value > 0)):
            return _fold(f"{a.value!r}^{b.value!r}", lambda: a.value**b.value)

    return Pow(a, b)
