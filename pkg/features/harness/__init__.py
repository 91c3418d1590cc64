from __future__ import annotations

from typing import TYPE_CHECKING

from .criteria import CRITERIA, Criterion, criterion
from .estimate import McEstimate, McPoint, Moments, map_batches, mc_estimate
from .slopes import (
    SlopeFit,
    check_time_grid,
    fit_slope,
    iterated_integral_remainder_slope,
    remainder_slope,
)
from .suite import (
    CriterionResult,
    SuiteConfig,
    SuiteReport,
    SuiteRun,
    load_suite_config,
    run_suite,
)
from .validate import DEFAULT_TIMES, ValidationReport, stderr_scaling, validate

if TYPE_CHECKING:
    from argparse import _SubParsersAction


def setup(subparsers: "_SubParsersAction") -> None:
    from .command import register

    register(subparsers)


__all__ = (
    "CRITERIA",
    "Criterion",
    "criterion",
    "McEstimate",
    "McPoint",
    "Moments",
    "map_batches",
    "mc_estimate",
    "SlopeFit",
    "check_time_grid",
    "fit_slope",
    "remainder_slope",
    "iterated_integral_remainder_slope",
    "CriterionResult",
    "SuiteConfig",
    "SuiteReport",
    "SuiteRun",
    "load_suite_config",
    "run_suite",
    "DEFAULT_TIMES",
    "ValidationReport",
    "validate",
    "stderr_scaling",
)
