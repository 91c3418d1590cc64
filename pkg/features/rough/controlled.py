from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from features.fbm import FbmPath
from tools.exceptions import IncompatibleGridError, InputError
from tools.parser import Expr, differentiate, lambdify

from .increments import holder_seminorm

__all__ = ("ControlledPath", "compose_controlled")

# Full remainder matrices are kept only below this many grid points.
_DENSE_LIMIT = 1025


@dataclass(frozen=True, eq=False)
class ControlledPath:
    """
    A path z weakly controlled by the driver x: δz_{st} = ζ_s δx_{st} + r_{st}.

    Attributes
    ----------
    z: np.ndarray
        Values, shape (P, *shape).
    zeta: np.ndarray
        Gubinelli derivative, shape (P, *shape, d).
    x: np.ndarray
        Driver values, shape (P, d).
    times: np.ndarray
        Grid times, shape (P,).
    """

    z: np.ndarray
    zeta: np.ndarray
    x: np.ndarray
    times: np.ndarray

    def __post_init__(self) -> None:
        P = self.times.shape[0]
        if self.z.shape[0] != P or self.zeta.shape[0] != P or self.x.shape[0] != P:
            raise IncompatibleGridError("controlled path arrays live on different grids")

        if self.zeta.shape != self.z.shape + (self.x.shape[1],):
            raise InputError(
                f"derivative shape {self.zeta.shape} does not match {self.z.shape} x {self.x.shape[1]}"
            )

    @classmethod
    def driver(cls, path: FbmPath) -> ControlledPath:
        """x itself, with ζ = identity and r = 0."""

        if path.batched:
            raise InputError("controlled paths are built on a single sample")

        x = path.values.T
        d = x.shape[1]
        zeta = np.broadcast_to(np.eye(d), (x.shape[0], d, d)).copy()
        return cls(x.copy(), zeta, x, path.grid.times)

    @property
    def d(self) -> int:
        return self.x.shape[1]

    @property
    def points(self) -> int:
        return self.times.shape[0]

    def remainder(self, s: np.ndarray | int, t: np.ndarray | int) -> np.ndarray:
        """r_{st} = δz_{st} - ζ_s δx_{st} for index arrays s, t."""

        s = np.asarray(s)
        t = np.asarray(t)
        dz = self.z[t] - self.z[s]
        dx = self.x[t] - self.x[s]
        dx = dx.reshape(dx.shape[:-1] + (1,) * (self.z.ndim - 1) + (self.d,))
        return dz - (self.zeta[s] * dx).sum(axis=-1)

    @cached_property
    def r(self) -> np.ndarray:
        if self.points > _DENSE_LIMIT:
            raise InputError(f"dense remainder is limited to {_DENSE_LIMIT} points")

        idx = np.arange(self.points)
        return self.remainder(idx[:, None], idx[None, :])

    def remainder_norm(self, mu: float) -> float:
        return holder_seminorm(self.r, mu, self.times)


def compose_controlled(phi: Sequence[Expr], z: ControlledPath) -> ControlledPath:
    """
    φ(z) for z with values in R^k: ẑ = φ(z), ζ̂ = ∇φ(z) ζ. The remainder
    follows from the stored values, so the controlled identity holds exactly.
    """

    if z.z.ndim != 2:
        raise InputError("composition needs a vector-valued controlled path")

    k = z.z.shape[1]
    columns = [z.z[:, i] for i in range(k)]
    values = np.stack([lambdify(e)(columns) for e in phi], axis=-1)
    grad = np.stack(
        [
            np.stack([lambdify(differentiate(e, i + 1))(columns) for i in range(k)], axis=-1)
            for e in phi
        ],
        axis=-2,
    )
    zeta = np.einsum("pek,pkd->ped", grad, z.zeta)
    return ControlledPath(values, zeta, z.x, z.times)
