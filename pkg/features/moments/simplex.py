"""
Integrals over the ordered simplex 0 < t_1 < ... < t_k < 1 of products of
singular kernels (t_q - t_p)^β, one per matched pair, with β = 2H - 2.

In gap coordinates g_0 = t_1, g_i = t_{i+1} - t_i, g_k = 1 - t_k the simplex
becomes the standard one and every kernel is a power of a sum of
consecutive gaps. Matched pairs split into crossing components that nest
inside one another; each component is integrated over its own gaps and
then collapsed into a single gap with a larger Dirichlet parameter.
Single pairs collapse exactly, two crossing pairs reduce to one
hypergeometric quadrature and bigger components are estimated by
importance sampling.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import IntEnum
from logging import getLogger
from typing import Optional, Sequence

import numpy as np
from scipy import integrate, special

import config
from tools.exceptions import InputError, QuadratureError, UnsupportedRegimeError

from .pairing import Matching, crossing_components

log = getLogger("fracdev/moments")

__all__ = (
    "Method",
    "SimplexIntegral",
    "simplex_kernel_integral",
    "gauss_jacobi_pair_integral",
    "dirichlet_log_norm",
)


class Method(IntEnum):
    exact = 0
    quadrature = 1
    monte_carlo = 2

    @property
    def label(self) -> str:
        return ("exact-closed-form", "quadrature", "monte-carlo")[self]


@dataclass(frozen=True, slots=True)
class SimplexIntegral:
    value: float
    error: float
    method: Method


@dataclass
class _Block:
    positions: tuple[int, ...]
    pairs: Matching
    children: list[_Block] = field(default_factory=list)

    @property
    def lo(self) -> int:
        return self.positions[0]

    @property
    def hi(self) -> int:
        return self.positions[-1]


@dataclass(slots=True)
class _Collapsed:
    param: float
    log_const: float = 0.0
    rel_err: float = 0.0
    method: Method = Method.exact


def dirichlet_log_norm(params: Sequence[float]) -> float:
    """log of Π Γ(a_i) / Γ(Σ a_i)."""

    params = np.asarray(params, dtype=float)
    return float(special.gammaln(params).sum() - special.gammaln(params.sum()))


def _nest(k: int, matching: Matching) -> _Block:
    root = _Block((0, k + 1), ())
    blocks = [
        _Block(tuple(sorted(p for pair in comp for p in pair)), comp)
        for comp in crossing_components(matching)
    ]
    # Smallest hull first, so each block finds its tightest enclosing block.
    candidates = sorted(blocks, key=lambda b: b.hi - b.lo)
    for block in blocks:
        parent = next(
            (c for c in candidates if c.lo < block.lo and block.hi < c.hi and c is not block),
            root,
        )
        parent.children.append(block)

    return root


class _Integrator:
    __slots__ = ("beta", "tol", "points", "rng", "strict")

    def __init__(self, beta: float, tol: float, points: int, seed: int, strict: bool):
        self.beta = beta
        self.tol = tol
        self.points = points
        self.rng = np.random.default_rng(seed)
        self.strict = strict

    def collapse(self, block: _Block) -> _Collapsed:
        out = _Collapsed(0.0)
        groups: list[float] = []
        x = block.positions
        for a, b in zip(x, x[1:]):
            inner = [c for c in block.children if a < c.lo and c.hi < b]
            params = [1.0] * ((b - a) - sum(c.hi - c.lo for c in inner))
            for child in inner:
                collapsed = self.collapse(child)
                params.append(collapsed.param)
                out.log_const += collapsed.log_const
                out.rel_err += collapsed.rel_err
                out.method = max(out.method, collapsed.method)

            out.log_const += dirichlet_log_norm(params)
            groups.append(sum(params))

        index = {p: i for i, p in enumerate(x)}
        spans = [(index[p], index[q]) for p, q in block.pairs]
        value, rel_err, method = self.kernel(groups, spans)
        out.log_const += value
        out.rel_err += rel_err
        out.method = max(out.method, method)
        out.param = sum(groups) + len(spans) * self.beta
        return out

    def kernel(self, groups: list[float], spans: list[tuple[int, int]]) -> tuple[float, float, Method]:
        """
        log ∫ Π u_g^{a_g - 1} Π_P (Σ_{g in P} u_g)^β over the simplex Σ u_g = 1,
        with its relative error and the method used.
        """

        if len(spans) <= 1:
            return 0.0, 0.0, Method.exact

        if len(spans) == 2:
            try:
                value, rel_err = self.two_crossing(*groups)
            except _QuadFailure as exc:
                log.warning(f"Quadrature did not converge ({exc}); falling back to sampling.")
            else:
                return math.log(value), rel_err, Method.quadrature

        value, rel_err = self.sampled(groups, spans)
        return math.log(value), rel_err, Method.monte_carlo

    def two_crossing(self, aL: float, aO: float, aR: float) -> tuple[float, float]:
        beta = self.beta
        prefactor = special.beta(aR, aO)

        def inner(s: float) -> float:
            return special.hyp2f1(aR + aO + beta, aO, aR + aO, 1.0 - s)

        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", integrate.IntegrationWarning)
            value, abserr = integrate.quad(
                inner,
                0.0,
                1.0,
                weight="alg",
                wvar=(aL + aO + beta - 1.0, aO + aR + beta - 1.0),
                epsabs=config.MOMENTS.QUAD_EPSABS,
                epsrel=config.MOMENTS.QUAD_EPSREL,
                limit=config.MOMENTS.QUAD_LIMIT,
            )

        if caught or not np.isfinite(value) or value <= 0 or abserr > self.tol * abs(value):
            if self.strict:
                raise QuadratureError(value * prefactor, abserr * prefactor)

            raise _QuadFailure(f"estimate {value!r}, error {abserr!r}")

        return value * prefactor, abserr / value

    def sampled(self, groups: list[float], spans: list[tuple[int, int]]) -> tuple[float, float]:
        # Each pair's leftmost gap absorbs the pair's singularity into the
        # proposal, leaving weights in (0, 1].
        proposal = np.asarray(groups, dtype=float)
        for left, _ in spans:
            proposal[left] += self.beta

        total = 0.0
        total_sq = 0.0
        remaining = self.points
        chunk = 100_000
        while remaining > 0:
            size = min(chunk, remaining)
            u = self.rng.dirichlet(proposal, size=size)
            cumulative = np.concatenate([np.zeros((size, 1)), np.cumsum(u, axis=1)], axis=1)
            w = np.ones(size)
            for left, right in spans:
                D = cumulative[:, right] - cumulative[:, left]
                w *= (D / u[:, left]) ** self.beta

            total += w.sum()
            total_sq += (w * w).sum()
            remaining -= size

        mean = total / self.points
        var = max(total_sq / self.points - mean * mean, 0.0)
        stderr = math.sqrt(var / self.points)
        if not np.isfinite(mean) or mean <= 0:
            raise QuadratureError(mean, stderr)

        return math.exp(dirichlet_log_norm(proposal)) * mean, stderr / mean


class _QuadFailure(Exception):
    pass


def _check(k: int, pairs: Sequence[tuple[int, int]], H: float) -> Matching:
    if not 0.5 < H < 1:
        raise UnsupportedRegimeError(f"the pair kernel needs 1/2 < H < 1, got {H}")

    matching = tuple(tuple(sorted(pair)) for pair in pairs)
    positions = [p for pair in matching for p in pair]
    if len(set(positions)) != len(positions) or any(not 1 <= p <= k for p in positions):
        raise InputError(f"pairs {pairs} are not disjoint positions in 1..{k}")

    return matching  # type: ignore[return-value]


def simplex_kernel_integral(
    k: int,
    pairs: Sequence[tuple[int, int]],
    H: float,
    *,
    tol: float = 1e-6,
    points: Optional[int] = None,
    seed: Optional[int] = None,
    strict: bool = False,
) -> SimplexIntegral:
    """
    ∫_{0<t_1<...<t_k<1} Π_{(p, q)} (t_q - t_p)^{2H - 2} dt.

    `strict` turns a non-converging quadrature into a :class:`QuadratureError`
    instead of a sampled estimate.
    """

    if k < 0:
        raise InputError("simplex dimension must be non-negative")

    matching = _check(k, pairs, H)
    integrator = _Integrator(
        beta=2 * H - 2,
        tol=tol,
        points=config.MOMENTS.MC_POINTS if points is None else points,
        seed=config.MOMENTS.MC_SEED if seed is None else seed,
        strict=strict,
    )
    collapsed = integrator.collapse(_nest(k, matching))
    value = math.exp(collapsed.log_const)
    return SimplexIntegral(value, value * collapsed.rel_err, collapsed.method)


def gauss_jacobi_pair_integral(k: int, pair: tuple[int, int], H: float, order: int = 16) -> float:
    """
    Single-pair simplex integral by a tensor Gauss-Jacobi rule.

    With x = t_p and t_q = x + (1 - x) y the other variables integrate to
    sub-simplex volumes and the integrand separates into
    x^{p-1} (1-x)^{β+k-p} · y^{β+q-p-1} (1-y)^{k-q}; the Jacobi weights take
    the singular factors, leaving polynomials for the nodes.
    """

    (p, q), = _check(k, [pair], H)
    if order < 1:
        raise InputError("quadrature order must be positive")

    beta = 2 * H - 2
    xi, wx = special.roots_jacobi(order, beta, 0.0)
    eta, wy = special.roots_jacobi(order, 0.0, beta)
    x = (1 + xi) / 2
    y = (1 + eta) / 2
    fx = x ** (p - 1) * (1 - x) ** (k - p)
    fy = y ** (q - p - 1) * (1 - y) ** (k - q)
    scale = 2.0 ** (-2 * (1 + beta))
    volumes = math.factorial(p - 1) * math.factorial(q - p - 1) * math.factorial(k - q)
    return float(scale * np.outer(wx * fx, wy * fy).sum() / volumes)
