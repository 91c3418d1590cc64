from .calculus import differentiate, evaluate, lambdify
from .grammar import parse
from .nodes import (
    FUNCTIONS,
    ONE,
    ZERO,
    Add,
    BinOp,
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
    var,
)

__all__ = (
    "parse",
    "differentiate",
    "lambdify",
    "evaluate",
    "FUNCTIONS",
    "ONE",
    "ZERO",
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
    "const",
    "var",
    "neg",
    "func",
    "add",
    "sub",
    "mul",
    "div",
    "power",
)
