from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from features.moments import MultiIndex
from features.symbolic import SdeSpec
from tools.exceptions import InputError

__all__ = ("ExpansionTerm", "Expansion", "AggregateTerm", "WordTerm")


@dataclass(frozen=True, slots=True)
class ExpansionTerm:
    """F(t)(a) E(∫_{Δ([0, 1])} dB^{word}) t^{H s + d} for one tree and slot assignment."""

    tree: str
    bracket: str
    l: int
    assignment: tuple[int, ...]
    word: MultiIndex
    coefficient: float
    moment: float
    moment_error: float
    n: int
    m: int
    exponent: float

    @property
    def zero(self) -> bool:
        return self.moment == 0.0

    def value(self, t: float) -> float:
        return self.coefficient * self.moment * t**self.exponent

    def to_document(self) -> dict[str, Any]:
        return {
            "tree": self.tree,
            "bracket": self.bracket,
            "assignment": list(self.assignment),
            "word": list(self.word.word),
            "coefficient": self.coefficient,
            "moment": self.moment,
            "moment_error": self.moment_error,
            "exponent": self.exponent,
            "power": [self.n, self.m],
        }


@dataclass(frozen=True)
class Expansion:
    spec: SdeSpec
    order: int
    terms: tuple[ExpansionTerm, ...]
    moment_method: str
    point: tuple[float, ...]
    form: str = "trees"

    @property
    def remainder_order(self) -> float:
        return (self.order + 1) * self.spec.H

    def truncate(self, order: int) -> Expansion:
        """
        The same expansion restricted to trees with at most order + 1 nodes,
        or words of length at most order.
        """

        kept = tuple(term for term in self.terms if term.l <= order + 1)
        return Expansion(self.spec, order, kept, self.moment_method, self.point, self.form)


@dataclass(frozen=True, slots=True)
class AggregateTerm:
    """Coefficient of t^{exponent}; `powers` lists every (n, m) with nH + m at that exponent."""

    exponent: float
    powers: tuple[tuple[int, int], ...]
    coefficient: float
    error: float

    @property
    def merged(self) -> bool:
        return len(self.powers) > 1

    @property
    def power(self) -> tuple[int, int]:
        if self.merged:
            raise InputError(f"t^{self.exponent:g} collects the powers {list(self.powers)}")

        return self.powers[0]

    def to_document(self) -> dict[str, Any]:
        return {
            "exponent": self.exponent,
            "powers": [list(p) for p in self.powers],
            "coefficient": self.coefficient,
            "error": self.error,
        }


@dataclass(frozen=True, slots=True)
class WordTerm:
    """Σ of F over the trees of one label word, next to 𝒟^α f(a) for the same word."""

    word: MultiIndex
    tree_sum: float
    operator_value: float
    moment: float
    trees: int

    def to_document(self) -> dict[str, Any]:
        return {
            "word": list(self.word.word),
            "tree_sum": self.tree_sum,
            "operator_value": self.operator_value,
            "moment": self.moment,
            "trees": self.trees,
        }
