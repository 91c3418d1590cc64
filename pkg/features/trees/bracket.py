"""
Bracket notation for labelled trees.

    γ^1                     the root alone
    (c, ..., c)^1           root with children
    τ_0^i / [c, ...]^i      deterministic leaf / internal node
    τ_{jk}^i / {c, ...}_{jk}^i
                            stochastic leaf / internal node carrying slot k

Children are written deterministic subtrees first, then stochastic ones,
each group by node number.
"""

from __future__ import annotations

from typing import Any

import pyparsing as pp

from tools.exceptions import BracketParseError, InputError

from .models import Kind, LabelledTree, NodeLabel

__all__ = ("bracket_string", "parse_bracket")


def _ordered_children(tree: LabelledTree, node: int) -> list[int]:
    return sorted(tree.children(node), key=lambda c: (tree.is_stochastic(c), c))


def _render(tree: LabelledTree, node: int) -> str:
    kids = ", ".join(_render(tree, c) for c in _ordered_children(tree, node))
    label = tree.label(node)
    if label.kind is Kind.ROOT:
        return f"({kids})^{node}" if kids else f"γ^{node}"

    if label.kind is Kind.DETERMINISTIC:
        return f"[{kids}]^{node}" if kids else f"τ_0^{node}"

    slot = f"_{{j{label.slot}}}"
    return f"{{{kids}}}{slot}^{node}" if kids else f"τ{slot}^{node}"


def bracket_string(tree: LabelledTree) -> str:
    return _render(tree, 1)


def _grammar() -> pp.ParserElement:
    node = pp.Forward()
    number = pp.Word(pp.nums).set_parse_action(lambda t: int(t[0]))
    sup = pp.Suppress("^") - number
    slot = pp.Suppress("_{j") - number + pp.Suppress("}")
    kids = pp.Group(pp.DelimitedList(node))
    tau = pp.Suppress(pp.Literal("τ") | pp.Literal("tau"))

    det_leaf = (tau + pp.Suppress("_0") - sup).set_parse_action(
        lambda t: ("det", t[0], None, [])
    )
    stoch_leaf = (tau + slot + sup).set_parse_action(lambda t: ("stoch", t[1], t[0], []))
    det_node = (pp.Suppress("[") - kids + pp.Suppress("]") + sup).set_parse_action(
        lambda t: ("det", t[1], None, list(t[0]))
    )
    stoch_node = (pp.Suppress("{") - kids + pp.Suppress("}") + slot + sup).set_parse_action(
        lambda t: ("stoch", t[2], t[1], list(t[0]))
    )
    node <<= det_leaf | stoch_leaf | det_node | stoch_node

    bare_root = (pp.Suppress(pp.Literal("γ") | pp.Literal("gamma")) - sup).set_parse_action(
        lambda t: ("root", t[0], None, [])
    )
    root = (pp.Suppress("(") - kids + pp.Suppress(")") + sup).set_parse_action(
        lambda t: ("root", t[1], None, list(t[0]))
    )
    return (bare_root | root).parse_with_tabs()


_GRAMMAR = _grammar()


def parse_bracket(text: str) -> LabelledTree:
    """Inverse of :func:`bracket_string`."""

    try:
        parsed: Any = _GRAMMAR.parse_string(text, parse_all=True)[0]
    except pp.ParseBaseException as exc:
        raise BracketParseError(text, exc.loc) from None

    parent: dict[int, int] = {}
    label: dict[int, NodeLabel] = {}

    def visit(item: Any, up: int | None) -> None:
        kind, number, slot, kids = item
        if number in label:
            raise BracketParseError(text, text.find(f"^{number}"), f"node {number} repeated")

        if kind == "root":
            label[number] = NodeLabel(Kind.ROOT)
        elif kind == "det":
            label[number] = NodeLabel(Kind.DETERMINISTIC)
        else:
            label[number] = NodeLabel(Kind.STOCHASTIC, slot)

        if up is not None:
            parent[number] = up

        for kid in kids:
            visit(kid, number)

    visit(parsed, None)
    l = len(label)
    if sorted(label) != list(range(1, l + 1)) or label.get(1, None) is None:
        raise BracketParseError(text, 0, "node numbers must be 1..l with the root as 1")

    try:
        return LabelledTree(
            tuple(parent[i] for i in range(2, l + 1)),
            tuple(label[i] for i in range(1, l + 1)),
        )
    except InputError as exc:
        raise BracketParseError(text, 0, str(exc)) from None
