from __future__ import annotations

from typing import Any

from rich.table import Table

from tools.formatter import exact, plural, table

from .engine import aggregate, polynomial
from .models import Expansion

__all__ = ("report",)


def report(expansion: Expansion, *, prune_zero: bool = False) -> tuple[dict[str, Any], list[Table]]:
    """
    JSON document and text tables of an expansion. Pruning hides the
    zero-moment rows from both; the term count still covers them.
    """

    terms = [t for t in expansion.terms if not (prune_zero and t.zero)]
    powers = aggregate(expansion)
    document = {
        "spec": expansion.spec.to_document(),
        "order": expansion.order,
        "point": list(expansion.point),
        "remainder_order": expansion.remainder_order,
        "moment_method": expansion.moment_method,
        "form": expansion.form,
        "term_count": len(expansion.terms),
        "terms": [t.to_document() for t in terms],
        "aggregate": [p.to_document() for p in powers],
        "polynomial": polynomial(powers),
    }
    rows = table(
        f"Expansion to order {expansion.order} ({plural(len(expansion.terms)):term})",
        ("tree" if expansion.form == "trees" else "word", "j", "F(t)(a)", "E(I)", "±", "ρ"),
        (
            (
                t.bracket or f"({t.word})",
                ",".join(map(str, t.assignment)) or "-",
                exact(t.coefficient),
                exact(t.moment),
                f"{t.moment_error:.1e}",
                f"{t.exponent:g}",
            )
            for t in terms
        ),
    )
    summary = table(
        f"P_t f(a) = {document['polynomial']} + O(t^{expansion.remainder_order:g})",
        ("power", "coefficient", "±"),
        ((f"t^{p.exponent:g}", exact(p.coefficient), f"{p.error:.1e}") for p in powers),
    )
    return document, [rows, summary]
