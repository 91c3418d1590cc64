from __future__ import annotations

import threading
from functools import reduce
from typing import Optional

import pyparsing as pp

from tools.exceptions import (
    ArityError,
    ExpressionSyntaxError,
    UnknownIdentifierError,
)

from .nodes import FUNCTIONS, Expr, add, const, div, func, mul, neg, power, sub, var

__all__ = ("parse",)

_BINARY = {"+": add, "-": sub, "*": mul, "/": div}


class _Unresolved(Exception):
    """Carries an identifier error out of a parse action."""

    def __init__(self, error: Exception):
        self.error = error


class ExpressionParser:
    """
    Infix grammar for scalar expressions.

        expr   :: term [ ('+' | '-') term ]*
        term   :: unary [ ('*' | '/') unary ]*
        unary  :: '-' unary | power
        power  :: atom [ '^' unary ]
        atom   :: number | func '(' expr ')' | 'x' digits | '(' expr ')'

    The `-` operator of pyparsing is used after every token that commits
    to a production, so an error is reported where the input stops making
    sense instead of at the start of the enclosing expression.
    """

    def __init__(self) -> None:
        self.text = ""
        self.n: Optional[int] = None

        lpar = pp.Suppress("(")
        rpar = pp.Suppress(")")
        number = pp.Regex(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
        ident = pp.Word(pp.alphas, pp.alphanums + "_")

        expr = pp.Forward()
        unary = pp.Forward()

        call = ident + lpar - pp.Group(pp.Optional(pp.DelimitedList(expr))) + rpar
        atom = (
            number.set_parse_action(self._number)
            | call.set_parse_action(self._call)
            | ident.copy().set_parse_action(self._variable)
            | (lpar - expr + rpar)
        )
        power = atom + pp.Optional(pp.Literal("^") - unary)
        power.set_parse_action(self._power)

        negation = pp.Literal("-") - unary
        negation.set_parse_action(lambda toks: neg(toks[1]))
        unary <<= negation | power

        term = unary + pp.ZeroOrMore(pp.one_of("* /") - unary)
        term.set_parse_action(self._chain)
        expr <<= term + pp.ZeroOrMore(pp.one_of("+ -") - term)
        expr.set_parse_action(self._chain)

        self.grammar = expr.parse_with_tabs()

    def _number(self, toks: pp.ParseResults) -> Expr:
        return const(float(toks[0]))

    def _variable(self, s: str, loc: int, toks: pp.ParseResults) -> Expr:
        name: str = toks[0]
        if name in FUNCTIONS:
            raise _Unresolved(ArityError(self.text, name, 1, 0, loc))

        if name[0] == "x" and name[1:].isdigit() and int(name[1:]) >= 1:
            index = int(name[1:])
            if self.n is None or index <= self.n:
                return var(index)

        raise _Unresolved(UnknownIdentifierError(self.text, name, loc))

    def _call(self, s: str, loc: int, toks: pp.ParseResults) -> Expr:
        name: str = toks[0]
        args = list(toks[1])
        if name not in FUNCTIONS:
            raise _Unresolved(UnknownIdentifierError(self.text, name, loc))

        if len(args) != 1:
            raise _Unresolved(ArityError(self.text, name, 1, len(args), loc))

        return func(name, args[0])

    def _power(self, toks: pp.ParseResults) -> Expr:
        if len(toks) == 1:
            return toks[0]

        return power(toks[0], toks[2])

    def _chain(self, toks: pp.ParseResults) -> Expr:
        items = list(toks)
        pairs = zip(items[1::2], items[2::2])
        return reduce(lambda acc, pair: _BINARY[pair[0]](acc, pair[1]), pairs, items[0])

    def parse(self, text: str, n: Optional[int] = None) -> Expr:
        self.text, self.n = text, n
        if not text.strip():
            raise ExpressionSyntaxError(text, len(text), "empty expression")

        try:
            result = self.grammar.parse_string(text, parse_all=True)
        except _Unresolved as exc:
            raise exc.error from None
        except pp.ParseBaseException as exc:
            raise ExpressionSyntaxError(text, exc.loc) from None

        return result[0]


_local = threading.local()


def parse(text: str, n: Optional[int] = None) -> Expr:
    """
    Parse `text` into an expression tree.

    When `n` is given, variables beyond `x{n}` are rejected as unknown
    identifiers.
    """

    parser = getattr(_local, "parser", None)
    if parser is None:
        parser = _local.parser = ExpressionParser()

    return parser.parse(text, n)
