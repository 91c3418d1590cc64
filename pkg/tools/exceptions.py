from __future__ import annotations

from typing import Optional, Sequence

__all__ = (
    "FracdevError",
    "InputError",
    "ComputationError",
    "ExpressionSyntaxError",
    "UnknownIdentifierError",
    "ArityError",
    "SpecError",
    "TreeCapacityError",
    "UnassignedSlotError",
    "BracketParseError",
    "WordCapError",
    "UnsupportedRegimeError",
    "OddWordError",
    "QuadratureError",
    "CovarianceFactorizationError",
    "IncompatibleGridError",
    "NotClosedError",
    "ExpressionDomainError",
    "SolverDivergenceError",
    "McFailureError",
    "SignalBelowNoiseError",
)


class FracdevError(Exception):
    """Base class for all library errors."""


class InputError(FracdevError):
    """Raised when user supplied input is rejected before any computation runs."""


class ComputationError(FracdevError):
    """Raised when a numerical procedure fails while running."""


class ExpressionSyntaxError(InputError):
    """
    Raised when an expression cannot be parsed.

    Attributes
    ----------
    text: str
        The expression that failed to parse.
    offset: int
        Character offset of the first offending token.
    """

    def __init__(self, text: str, offset: int, message: str = "invalid syntax"):
        self.text = text
        self.offset = offset
        super().__init__(f"{message} at offset {offset} in {text!r}")


class UnknownIdentifierError(ExpressionSyntaxError):
    """
    Raised when an expression refers to a variable or function that does not exist.

    Attributes
    ----------
    name: str
        The unknown identifier.
    """

    def __init__(self, text: str, name: str, offset: int):
        self.name = name
        super().__init__(text, offset, f"unknown identifier {name!r}")


class ArityError(ExpressionSyntaxError):
    """
    Raised when a function receives the wrong number of arguments.

    Attributes
    ----------
    name: str
        The function name.
    expected: int
        Number of arguments the function accepts.
    got: int
        Number of arguments that were passed.
    """

    def __init__(self, text: str, name: str, expected: int, got: int, offset: int):
        self.name = name
        self.expected = expected
        self.got = got
        super().__init__(
            text, offset, f"{name} takes {expected} argument(s) but got {got}"
        )


class SpecError(InputError):
    """Raised when an SDE specification has inconsistent dimensions or parameters."""


class TreeCapacityError(InputError):
    """
    Raised when a tree enumeration would exceed the configured node cap.

    Attributes
    ----------
    requested: int
        Requested maximal node count.
    cap: int
        Configured maximal node count.
    count: int
        Number of trees the request would produce.
    """

    def __init__(self, requested: int, cap: int, count: int):
        self.requested = requested
        self.cap = cap
        self.count = count
        super().__init__(
            f"enumerating trees up to {requested} nodes yields {count:,} trees, "
            f"the cap is {cap} nodes"
        )


class UnassignedSlotError(InputError):
    """Raised when a label word is requested without a complete index assignment."""


class BracketParseError(InputError):
    """
    Raised when a bracket string cannot be parsed back into a tree.

    Attributes
    ----------
    offset: int
        Character offset of the failure.
    """

    def __init__(self, text: str, offset: int, message: str = "malformed bracket string"):
        self.text = text
        self.offset = offset
        super().__init__(f"{message} at offset {offset} in {text!r}")


class WordCapError(InputError):
    """Raised when a multi-index is longer than the configured moment cap."""


class UnsupportedRegimeError(InputError):
    """Raised when an operation is requested for a Hurst parameter it does not cover."""


class OddWordError(InputError):
    """Raised when matchings are requested for a word with an odd number of noise letters."""


class QuadratureError(ComputationError):
    """
    Raised when adaptive quadrature does not reach the requested tolerance.

    Attributes
    ----------
    estimate: float
        Last estimate produced.
    error: float
        Error estimate of the last attempt.
    """

    def __init__(self, estimate: float, error: float):
        self.estimate = estimate
        self.error = error
        super().__init__(f"quadrature did not converge (estimate={estimate!r}, error={error!r})")


class CovarianceFactorizationError(ComputationError):
    """
    Raised when the increment covariance is not numerically positive semidefinite.

    Attributes
    ----------
    eigenvalue: float
        The most negative eigenvalue found.
    """

    def __init__(self, eigenvalue: float):
        self.eigenvalue = eigenvalue
        super().__init__(f"covariance is not positive semidefinite (eigenvalue {eigenvalue!r})")


class IncompatibleGridError(InputError):
    """Raised when paths, areas or controlled paths live on grids that cannot be combined."""


class NotClosedError(InputError):
    """
    Raised when the sewing map receives a 3-increment whose coboundary does not vanish.

    Attributes
    ----------
    defect: float
        Largest absolute entry of the coboundary.
    """

    def __init__(self, defect: float):
        self.defect = defect
        super().__init__(f"3-increment is not closed (max |δh| = {defect!r})")


class ExpressionDomainError(ComputationError):
    """
    Raised when an expression is evaluated outside its domain.

    Attributes
    ----------
    step: Optional[int]
        Solver step at which the failure happened, if any.
    node_path: Sequence[int]
        Tree nodes visited when the failure happened, root first.
    """

    def __init__(
        self,
        message: str,
        *,
        step: Optional[int] = None,
        node_path: Sequence[int] = (),
    ):
        self.step = step
        self.node_path = tuple(node_path)
        where = []
        if step is not None:
            where.append(f"step {step}")

        if self.node_path:
            where.append("node path " + "/".join(map(str, self.node_path)))

        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")


class SolverDivergenceError(ComputationError):
    """
    Raised when a trajectory leaves the configured divergence bound.

    Attributes
    ----------
    step: int
        Step at which the bound was exceeded.
    value: float
        Offending state magnitude.
    """

    def __init__(self, step: int, value: float):
        self.step = step
        self.value = value
        super().__init__(f"trajectory diverged at step {step} (|X| = {value:.3e})")


class McFailureError(ComputationError):
    """
    Raised when too many Monte Carlo paths fail.

    Attributes
    ----------
    failed: int
        Number of failed paths.
    total: int
        Number of simulated paths.
    """

    def __init__(self, failed: int, total: int):
        self.failed = failed
        self.total = total
        super().__init__(f"{failed} of {total} paths failed")


class SignalBelowNoiseError(ComputationError):
    """Raised when fewer usable points remain than a slope fit needs."""
