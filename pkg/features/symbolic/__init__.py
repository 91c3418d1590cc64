from .closed_form import second_order_closed_form
from .derivatives import gradient, hessian, jacobian, partial, to_callable
from .elementary import elementary_differential, multilinear
from .operators import apply_D, apply_D_alpha
from .spec import (
    Experiment,
    ExpansionSettings,
    McConfig,
    MomentSettings,
    SdeSpec,
    UnboundedExpressionWarning,
    load_experiment,
    load_spec,
)

__all__ = (
    "SdeSpec",
    "Experiment",
    "ExpansionSettings",
    "McConfig",
    "MomentSettings",
    "UnboundedExpressionWarning",
    "load_experiment",
    "load_spec",
    "partial",
    "gradient",
    "hessian",
    "jacobian",
    "to_callable",
    "apply_D",
    "apply_D_alpha",
    "elementary_differential",
    "multilinear",
    "second_order_closed_form",
)
