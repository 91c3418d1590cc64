from __future__ import annotations

from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from features.symbolic import SdeSpec, jacobian, to_callable

__all__ = ("VectorFields",)

Compiled = Callable[[Sequence[np.ndarray]], np.ndarray]


class VectorFields:
    """
    Compiled drift and diffusion of a spec, evaluated on states of shape
    (..., n). With `strict`, leaving an expression's domain raises;
    otherwise the offending entries become NaN.
    """

    def __init__(self, spec: SdeSpec, *, strict: bool = True):
        self.spec = spec
        self.strict = strict
        self._b = [to_callable(e, strict=strict) for e in spec.drift]
        self._sigma = [[to_callable(e, strict=strict) for e in row] for row in spec.diffusion]

    @staticmethod
    def _columns(X: np.ndarray) -> list[np.ndarray]:
        return [X[..., k] for k in range(X.shape[-1])]

    def drift(self, X: np.ndarray) -> np.ndarray:
        cols = self._columns(X)
        return np.stack([fn(cols) for fn in self._b], axis=-1)

    def diffusion(self, X: np.ndarray) -> np.ndarray:
        """σ(X) with shape (..., n, d)."""

        cols = self._columns(X)
        return np.stack([np.stack([fn(cols) for fn in row], axis=-1) for row in self._sigma], axis=-2)

    @cached_property
    def _db(self) -> list[list[Compiled]]:
        return [
            [to_callable(e, strict=self.strict) for e in row]
            for row in jacobian(self.spec.drift, self.spec.n)
        ]

    @cached_property
    def _dsigma(self) -> list[list[list[Compiled]]]:
        columns = [self.spec.column(j) for j in range(1, self.spec.d + 1)]
        jacobians = [jacobian(col, self.spec.n) for col in columns]
        return [
            [[to_callable(e, strict=self.strict) for e in jacobians[j][i]] for j in range(self.spec.d)]
            for i in range(self.spec.n)
        ]

    def drift_jacobian(self, X: np.ndarray) -> np.ndarray:
        """∂_k b^i with shape (..., n, n)."""

        cols = self._columns(X)
        return np.stack([np.stack([fn(cols) for fn in row], axis=-1) for row in self._db], axis=-2)

    def diffusion_jacobian(self, X: np.ndarray) -> np.ndarray:
        """∂_k σ^{i,j} with shape (..., n, d, n)."""

        cols = self._columns(X)
        return np.stack(
            [
                np.stack([np.stack([fn(cols) for fn in ks], axis=-1) for ks in row], axis=-2)
                for row in self._dsigma
            ],
            axis=-3,
        )
