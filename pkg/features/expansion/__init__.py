from __future__ import annotations

from typing import TYPE_CHECKING

from .engine import aggregate, evaluate, expand, partial_sums, polynomial, word_form
from .models import AggregateTerm, Expansion, ExpansionTerm, WordTerm
from .report import report

if TYPE_CHECKING:
    from argparse import _SubParsersAction


def setup(subparsers: "_SubParsersAction") -> None:
    from .command import register

    register(subparsers)


__all__ = (
    "Expansion",
    "ExpansionTerm",
    "AggregateTerm",
    "WordTerm",
    "expand",
    "evaluate",
    "aggregate",
    "polynomial",
    "partial_sums",
    "word_form",
    "report",
)
