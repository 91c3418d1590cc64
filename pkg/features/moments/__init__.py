from __future__ import annotations

from typing import TYPE_CHECKING

from .moments import (
    GrowthProfile,
    MomentResult,
    PositivityReport,
    derivative_split,
    expected_iterated_integral,
    closed_form_moment,
    gamma_H,
    growth_profile,
    growth_word,
    permutation_sum_moment,
    positivity_check,
    scaled_moment,
    second_moment_iterated_integral,
    simulated_iterated_integral,
    trivial_series_coefficient,
)
from .pairing import crossing_components, crosses, valid_matchings
from .simplex import Method, SimplexIntegral, gauss_jacobi_pair_integral, simplex_kernel_integral
from .words import MultiIndex, shuffle

if TYPE_CHECKING:
    from argparse import _SubParsersAction


def setup(subparsers: "_SubParsersAction") -> None:
    from .command import register

    register(subparsers)


__all__ = (
    "MultiIndex",
    "shuffle",
    "MomentResult",
    "PositivityReport",
    "GrowthProfile",
    "Method",
    "SimplexIntegral",
    "gamma_H",
    "closed_form_moment",
    "expected_iterated_integral",
    "permutation_sum_moment",
    "second_moment_iterated_integral",
    "simulated_iterated_integral",
    "derivative_split",
    "positivity_check",
    "scaled_moment",
    "growth_profile",
    "growth_word",
    "trivial_series_coefficient",
    "valid_matchings",
    "crosses",
    "crossing_components",
    "simplex_kernel_integral",
    "gauss_jacobi_pair_integral",
)
