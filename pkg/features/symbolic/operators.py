from __future__ import annotations

from logging import getLogger
from typing import Sequence

import config
from tools.cache import cache
from tools.exceptions import InputError
from tools.parser import ZERO, Expr, add, mul

from .derivatives import partial
from .spec import SdeSpec

log = getLogger("fracdev/symbolic")

__all__ = ("apply_D", "apply_D_alpha")


@cache(maxsize=config.MOMENTS.CACHE_SIZE)
def apply_D(spec: SdeSpec, e: Expr, j: int) -> Expr:
    """
    𝒟^0 e = Σ_k b^k ∂_k e and 𝒟^j e = Σ_k σ^{k,j} ∂_k e.
    """

    if not 0 <= j <= spec.d:
        raise InputError(f"operator index {j} outside 0..{spec.d}")

    out: Expr = ZERO
    for k, coefficient in enumerate(spec.column(j), start=1):
        out = add(out, mul(coefficient, partial(e, (k,))))

    return out


def apply_D_alpha(spec: SdeSpec, e: Expr, alpha: Sequence[int]) -> Expr:
    """
    𝒟^{α_1} 𝒟^{α_2} ... 𝒟^{α_m} e in written order, so 𝒟^{α_m} acts first.

    For the label word α of a tree class, the sum of its elementary
    differentials at a equals ``apply_D_alpha(spec, spec.f, reversed(α))``.
    """

    out = e
    for j in reversed(tuple(alpha)):
        out = apply_D(spec, out, j)

    log.debug(f"𝒟^{tuple(alpha)} applied, {len(str(out))} characters.")
    return out
