from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Literal, Mapping, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

import config
from tools import read_json
from tools.exceptions import ExpressionSyntaxError, SpecError
from tools.parser import Expr, parse

__all__ = (
    "SdeSpec",
    "UnboundedExpressionWarning",
    "ExpansionSettings",
    "MomentSettings",
    "McConfig",
    "Experiment",
    "load_spec",
    "load_experiment",
)


class UnboundedExpressionWarning(UserWarning):
    """Emitted when a coefficient is not obviously bounded."""


@dataclass(frozen=True)
class SdeSpec:
    """
    dX = b(X) dt + σ(X) dB, X_0 = a, driven by d independent fBm components
    with Hurst parameter H, observed through the test function f.
    """

    H: float
    a: tuple[float, ...]
    drift: tuple[Expr, ...]
    diffusion: tuple[tuple[Expr, ...], ...]
    f: Expr
    T: float = 1.0
    n: int = field(init=False)
    d: int = field(init=False)

    def __post_init__(self) -> None:
        n = len(self.a)
        object.__setattr__(self, "n", n)
        if n < 1:
            raise SpecError("the initial point needs at least one coordinate")

        if len(self.drift) != n or len(self.diffusion) != n:
            raise SpecError(f"drift and diffusion need {n} rows")

        d = len(self.diffusion[0])
        if d < 1 or any(len(row) != d for row in self.diffusion):
            raise SpecError("every diffusion row needs the same number d >= 1 of columns")

        object.__setattr__(self, "d", d)
        if not 1 / 3 < self.H < 1:
            raise SpecError(f"Hurst parameter {self.H} outside (1/3, 1)")

        if not self.T > 0:
            raise SpecError("horizon T must be positive")

        for e in self.expressions():
            if e.variables() and max(e.variables()) > n:
                raise SpecError(f"{e} refers to a variable beyond x{n}")

    @classmethod
    def from_strings(
        cls,
        H: float,
        a: Sequence[float],
        drift: Sequence[str],
        diffusion: Sequence[Sequence[str]],
        f: str,
        T: float = 1.0,
    ) -> SdeSpec:
        n = len(a)
        return cls(
            H=float(H),
            a=tuple(float(v) for v in a),
            drift=tuple(parse(e, n) for e in drift),
            diffusion=tuple(tuple(parse(e, n) for e in row) for row in diffusion),
            f=parse(f, n),
            T=float(T),
        )

    def expressions(self) -> list[Expr]:
        return [*self.drift, *(e for row in self.diffusion for e in row), self.f]

    def sigma(self, i: int, j: int) -> Expr:
        return self.diffusion[i - 1][j - 1]

    def column(self, j: int) -> tuple[Expr, ...]:
        """Vector field driven by letter j; letter 0 is the drift."""

        if j == 0:
            return self.drift

        return tuple(row[j - 1] for row in self.diffusion)

    @cached_property
    def point(self) -> np.ndarray:
        return np.asarray(self.a, dtype=float)

    def replace(self, **changes: Any) -> SdeSpec:
        values = {
            "H": self.H,
            "a": self.a,
            "drift": self.drift,
            "diffusion": self.diffusion,
            "f": self.f,
            "T": self.T,
        }
        values.update(changes)
        return SdeSpec(**values)

    def unbounded(self) -> list[str]:
        names = [f"b{i}" for i in range(1, self.n + 1)]
        names += [f"σ{i}{j}" for i in range(1, self.n + 1) for j in range(1, self.d + 1)]
        names.append("f")
        return [name for name, e in zip(names, self.expressions()) if not e.is_bounded()]

    def warn_unbounded(self) -> None:
        offenders = self.unbounded()
        if offenders:
            warnings.warn(
                "expressions "
                + ", ".join(offenders)
                + " are not obviously bounded; the expansion assumes bounded coefficients",
                UnboundedExpressionWarning,
                stacklevel=2,
            )

    def to_document(self) -> dict[str, Any]:
        return {
            "hurst": self.H,
            "n": self.n,
            "d": self.d,
            "a": list(self.a),
            "T": self.T,
            "drift": [str(e) for e in self.drift],
            "diffusion": [[str(e) for e in row] for row in self.diffusion],
            "f": str(self.f),
        }


class _Settings(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ExpansionSettings(_Settings):
    order: int = Field(2, ge=0)
    prune_zero: bool = False


class MomentSettings(_Settings):
    method: Literal["pairing", "mc"] = "pairing"
    tol: float = Field(1e-6, gt=0)
    paths: int = Field(config.MOMENTS.SIM_PATHS, ge=2)
    steps: int = Field(config.MOMENTS.SIM_STEPS, ge=1)


class McConfig(_Settings):
    paths: int = Field(10_000, ge=1)
    steps: int = Field(256, ge=1)
    seed: int = 0
    scheme: Optional[Literal["euler", "heun", "rough"]] = None
    t_values: tuple[float, ...] = ()
    batch_size: int = Field(config.FBM.BATCH_SIZE, ge=1)
    area_refinement: int = Field(config.HARNESS.AREA_REFINEMENT, ge=1)

    @field_validator("t_values")
    @classmethod
    def _positive_times(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if any(t <= 0 for t in value):
            raise ValueError("t_values must be positive")

        return value

    def resolved_scheme(self, H: float) -> str:
        if self.scheme is not None:
            return self.scheme

        return "heun" if H > 0.5 else "rough"

    def check_horizon(self, T: float) -> None:
        late = [t for t in self.t_values if t > T]
        if late:
            raise SpecError(f"t_values {late} lie beyond the horizon T = {T}")


class Experiment(_Settings):
    """One JSON document describing an experiment. Unknown keys are rejected."""

    hurst: float
    n: int = Field(ge=1)
    d: int = Field(ge=1)
    a: tuple[float, ...]
    T: float = Field(1.0, gt=0)
    drift: tuple[str, ...]
    diffusion: tuple[tuple[str, ...], ...]
    f: str
    expansion: ExpansionSettings = ExpansionSettings()
    mc: McConfig = McConfig()
    moments: MomentSettings = MomentSettings()

    @cached_property
    def spec(self) -> SdeSpec:
        if len(self.a) != self.n:
            raise SpecError(f"a has {len(self.a)} coordinates but n = {self.n}")

        if any(len(row) != self.d for row in self.diffusion):
            raise SpecError(f"every diffusion row needs d = {self.d} entries")

        try:
            spec = SdeSpec.from_strings(
                self.hurst, self.a, self.drift, self.diffusion, self.f, self.T
            )
        except ExpressionSyntaxError as exc:
            raise SpecError(f"cannot parse expression: {exc}") from None

        self.mc.check_horizon(spec.T)
        return spec


def load_experiment(source: str | Path | Mapping[str, Any]) -> Experiment:
    data = source if isinstance(source, Mapping) else read_json(source)
    try:
        experiment = Experiment.model_validate(data)
    except ValidationError as exc:
        raise SpecError(str(exc)) from None

    _ = experiment.spec  # parse eagerly so errors surface at load time
    return experiment


def load_spec(source: str | Path | Mapping[str, Any]) -> SdeSpec:
    return load_experiment(source).spec
