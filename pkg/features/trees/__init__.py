from __future__ import annotations

from typing import TYPE_CHECKING

from .bracket import bracket_string, parse_bracket
from .enumeration import (
    count_at_level,
    count_up_to,
    enumerate_lts,
    group_by_word,
    index_assignments,
    iter_level,
    iter_trees,
    trees_with_word,
)
from .models import Kind, LabelledTree, NodeLabel, TreeStats

if TYPE_CHECKING:
    from argparse import _SubParsersAction


def setup(subparsers: "_SubParsersAction") -> None:
    from .command import register

    register(subparsers)


__all__ = (
    "Kind",
    "NodeLabel",
    "LabelledTree",
    "TreeStats",
    "bracket_string",
    "parse_bracket",
    "count_at_level",
    "count_up_to",
    "enumerate_lts",
    "group_by_word",
    "index_assignments",
    "iter_level",
    "iter_trees",
    "trees_with_word",
)
