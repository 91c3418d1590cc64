from __future__ import annotations

from typing import TYPE_CHECKING

from .convergence import self_convergence
from .fields import VectorFields
from .models import ConvergenceReport, Trajectory, VariationalPath
from .schemes import default_scheme, march, solve, solve_rough, solve_young
from .variational import variational_path

if TYPE_CHECKING:
    from argparse import _SubParsersAction


def setup(subparsers: "_SubParsersAction") -> None:
    from .command import register

    register(subparsers)


__all__ = (
    "Trajectory",
    "VariationalPath",
    "ConvergenceReport",
    "VectorFields",
    "default_scheme",
    "march",
    "solve",
    "solve_young",
    "solve_rough",
    "variational_path",
    "self_convergence",
)
