from .controlled import ControlledPath, compose_controlled
from .increments import (
    coboundary,
    delta1,
    delta2,
    dyadic_holder_seminorm,
    dyadic_holder_seminorm3,
    holder_seminorm,
    iterated_sum,
    join,
    ordered,
)
from .integrals import (
    compensated_integral,
    compensated_terms,
    ito_refinement,
    ito_residual,
    refinement_sequence,
    young_integral,
)
from .iterated import iterated_integral
from .sewing import closedness_defect, decompose, riemann_sums, sew

__all__ = (
    "ControlledPath",
    "compose_controlled",
    "coboundary",
    "delta1",
    "delta2",
    "join",
    "iterated_sum",
    "ordered",
    "holder_seminorm",
    "dyadic_holder_seminorm",
    "dyadic_holder_seminorm3",
    "young_integral",
    "compensated_integral",
    "compensated_terms",
    "refinement_sequence",
    "ito_residual",
    "ito_refinement",
    "iterated_integral",
    "closedness_defect",
    "sew",
    "decompose",
    "riemann_sums",
)
