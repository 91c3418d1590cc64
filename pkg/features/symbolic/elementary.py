from __future__ import annotations

from itertools import product
from typing import Optional, Sequence

import numpy as np

from features.trees import Kind, LabelledTree
from tools.exceptions import ExpressionDomainError, UnassignedSlotError
from tools.parser import Expr, evaluate

from .derivatives import partial
from .spec import SdeSpec

__all__ = ("elementary_differential", "multilinear")


def multilinear(
    g: Expr, point: Sequence[float], vectors: Sequence[np.ndarray], n: int
) -> float:
    """g^{(k)}(point)(v_1, ..., v_k), the symmetric k-linear form of the derivatives."""

    if not vectors:
        return evaluate(g, point)

    total = 0.0
    for ks in product(range(n), repeat=len(vectors)):
        weight = 1.0
        for v, k in zip(vectors, ks):
            weight *= v[k]
            if weight == 0.0:
                break

        if weight != 0.0:
            total += weight * evaluate(partial(g, tuple(k + 1 for k in ks)), point)

    return total


def _node_field(spec: SdeSpec, tree: LabelledTree, node: int, assignment: Sequence[int]):
    label = tree.label(node)
    if label.kind is Kind.ROOT:
        return None

    if label.kind is Kind.DETERMINISTIC:
        return spec.drift

    j = assignment[label.slot - 1]  # type: ignore[operator]
    if not 1 <= j <= spec.d:
        raise UnassignedSlotError(f"slot index {j} outside 1..{spec.d}")

    return spec.column(j)


def elementary_differential(
    spec: SdeSpec,
    tree: LabelledTree,
    assignment: Sequence[int],
    a: Optional[Sequence[float]] = None,
) -> float:
    """
    F(t)(a): the root contributes derivatives of f, τ_0 nodes derivatives
    of b and τ_j nodes derivatives of σ^{·,j}, each applied to the values
    of the node's children.
    """

    if len(assignment) != tree.s:
        raise UnassignedSlotError(
            f"tree {tree.ident} has {tree.s} slots, got {len(assignment)} indices"
        )

    point = tuple(spec.a if a is None else a)
    n = spec.n

    def value(node: int, path: tuple[int, ...]) -> np.ndarray | float:
        path = (*path, node)
        kids = [np.asarray(value(c, path)) for c in tree.children(node)]
        field = _node_field(spec, tree, node, assignment)
        try:
            if field is None:
                return multilinear(spec.f, point, kids, n)

            return np.array([multilinear(g, point, kids, n) for g in field])
        except ExpressionDomainError as exc:
            if exc.node_path:
                raise

            raise ExpressionDomainError(str(exc), node_path=path) from None

    return float(value(1, ()))
