from __future__ import annotations

import math
from collections import defaultdict
from itertools import product
from logging import getLogger
from typing import Iterable, Iterator, Optional, Sequence

import config
from features.moments.words import MultiIndex
from tools import capture_time
from tools.exceptions import InputError, TreeCapacityError

from .models import LabelledTree

log = getLogger("fracdev/trees")

__all__ = (
    "count_at_level",
    "count_up_to",
    "iter_trees",
    "enumerate_lts",
    "index_assignments",
    "group_by_word",
)


def count_at_level(l: int) -> int:
    """Number of labelled trees with exactly `l` nodes, (l - 1)! 2^(l - 1)."""

    if l < 1:
        return 0

    return math.factorial(l - 1) * 2 ** (l - 1)


def count_up_to(max_nodes: int) -> int:
    return sum(count_at_level(l) for l in range(1, max_nodes + 1))


def iter_level(l: int) -> Iterator[LabelledTree]:
    """Trees with exactly `l` nodes by parent vector, then label word."""

    parent_ranges = [range(1, i) for i in range(2, l + 1)]
    for parents in product(*parent_ranges):
        for bits in product((0, 1), repeat=l - 1):
            yield LabelledTree.build(parents, bits)


def iter_trees(max_nodes: int, cap: Optional[int] = None) -> Iterator[LabelledTree]:
    if max_nodes < 1:
        raise InputError("max_nodes must be at least 1")

    cap = config.TREES.MAX_NODES if cap is None else cap
    if max_nodes > cap:
        raise TreeCapacityError(max_nodes, cap, count_up_to(max_nodes))

    for l in range(1, max_nodes + 1):
        yield from iter_level(l)


def enumerate_lts(max_nodes: int, cap: Optional[int] = None) -> list[LabelledTree]:
    """Every monotonically labelled stochastic tree with at most `max_nodes` nodes."""

    with capture_time(f"Enumerated trees up to {max_nodes} nodes", log):
        return list(iter_trees(max_nodes, cap))


def index_assignments(tree: LabelledTree, d: int) -> Iterator[tuple[int, ...]]:
    if d < 1:
        raise InputError("noise dimension must be at least 1")

    return product(range(1, d + 1), repeat=tree.s)


def group_by_word(
    trees: Iterable[LabelledTree], d: int
) -> dict[MultiIndex, list[tuple[LabelledTree, tuple[int, ...]]]]:
    """
    Partition (tree, assignment) pairs by label word. Words of length m
    reached from trees with m + 1 nodes cover all of {0..d}^m.
    """

    groups: defaultdict[MultiIndex, list[tuple[LabelledTree, tuple[int, ...]]]] = defaultdict(
        list
    )
    for tree in trees:
        for assignment in index_assignments(tree, d):
            groups[tree.label_word(assignment)].append((tree, assignment))

    return dict(groups)


def trees_with_word(
    word: Sequence[int], trees: Optional[Iterable[LabelledTree]] = None
) -> list[tuple[LabelledTree, tuple[int, ...]]]:
    """The trees (with their unique compatible assignment) carrying `word`."""

    alpha = MultiIndex.of(word)
    bits = tuple(int(a != 0) for a in alpha)
    assignment = tuple(a for a in alpha if a != 0)
    source = trees if trees is not None else iter_level(alpha.length + 1)
    return [(t, assignment) for t in source if t.bits == bits]
