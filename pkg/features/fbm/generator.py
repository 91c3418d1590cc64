from __future__ import annotations

from logging import getLogger
from typing import Iterator, Literal, Optional

import numpy as np
from boltons.iterutils import chunked_iter
from scipy import linalg

import config
from tools import derive_seed
from tools.cache import cache
from tools.exceptions import CovarianceFactorizationError, InputError

from .models import FbmPath, Grid

log = getLogger("fracdev/fbm")

__all__ = (
    "covariance",
    "increment_autocovariance",
    "fgn",
    "sample",
    "sample_batch",
    "iter_batches",
)

Method = Literal["circulant", "cholesky"]


def covariance(H: float, t: float, s: float) -> float:
    """R_H(t, s) = ½ (s^{2H} + t^{2H} - |t - s|^{2H})."""

    if t < 0 or s < 0:
        raise InputError("covariance is defined for non-negative times")

    h2 = 2 * H
    return 0.5 * (s**h2 + t**h2 - abs(t - s) ** h2)


def increment_autocovariance(H: float, lags: np.ndarray, dt: float = 1.0) -> np.ndarray:
    k = np.abs(np.asarray(lags, dtype=float))
    h2 = 2 * H
    return 0.5 * dt**h2 * (np.abs(k + 1) ** h2 - 2 * k**h2 + np.abs(k - 1) ** h2)


@cache(maxsize=64)
def _circulant_sqrt(H: float, N: int) -> Optional[np.ndarray]:
    gamma = increment_autocovariance(H, np.arange(N + 1))
    row = np.concatenate([gamma, gamma[-2:0:-1]])
    eigenvalues = np.fft.fft(row).real
    floor = config.FBM.PSD_TOLERANCE * max(eigenvalues.max(), 1.0)
    if eigenvalues.min() < -floor:
        log.warning(
            f"Circulant embedding for H={H}, N={N} has eigenvalue {eigenvalues.min():.3e}; "
            "using a dense factorization."
        )
        return None

    return np.sqrt(np.maximum(eigenvalues, 0.0) / row.size)


@cache(maxsize=16)
def _cholesky_factor(H: float, N: int) -> np.ndarray:
    matrix = linalg.toeplitz(increment_autocovariance(H, np.arange(N)))
    try:
        return linalg.cholesky(matrix, lower=True)
    except linalg.LinAlgError:
        raise CovarianceFactorizationError(float(linalg.eigvalsh(matrix).min())) from None


def fgn(
    H: float,
    N: int,
    size: int,
    rng: np.random.Generator,
    *,
    method: Method = "circulant",
) -> np.ndarray:
    """
    `size` independent fractional Gaussian noise vectors of length N with unit
    step, shape (size, N). Scale by dt^H for a grid of step dt.
    """

    if not 0 < H < 1:
        raise InputError(f"Hurst parameter {H} outside (0, 1)")

    if N < 1 or size < 0:
        raise InputError("need N >= 1 and a non-negative sample size")

    scale = _circulant_sqrt(H, N) if method == "circulant" else None
    if scale is None:
        factor = _cholesky_factor(H, N)
        return rng.standard_normal((size, N)) @ factor.T

    # Real and imaginary parts of one transform are independent samples.
    pairs = (size + 1) // 2
    m = scale.size
    z = rng.standard_normal((pairs, m)) + 1j * rng.standard_normal((pairs, m))
    y = np.fft.fft(scale * z, axis=-1)[:, :N]
    return np.concatenate([y.real, y.imag])[:size]


def sample(
    H: float,
    grid: Grid,
    d: int = 1,
    seed: int = 0,
    *,
    method: Method = "circulant",
) -> FbmPath:
    """One path of d independent components, B_0 = 0."""

    if d < 1:
        raise InputError("noise dimension must be at least 1")

    rng = np.random.default_rng(seed)
    noise = fgn(H, grid.steps, d, rng, method=method) * grid.dt**H
    values = np.concatenate([np.zeros((d, 1)), np.cumsum(noise, axis=-1)], axis=-1)
    return FbmPath(grid, values, H, seed)


def iter_batches(
    H: float,
    grid: Grid,
    d: int,
    paths: int,
    seed: int,
    *,
    stream: int | str = 0,
    batch_size: Optional[int] = None,
    method: Method = "circulant",
) -> Iterator[np.ndarray]:
    """
    Yield arrays of shape (batch, d, N + 1). Batch b draws from a generator
    seeded by derive_seed(seed, stream, b), so the paths do not depend on
    who consumes the batches or in which order.
    """

    if paths < 1:
        raise InputError("need at least one path")

    size = batch_size or config.FBM.BATCH_SIZE
    for b, chunk in enumerate(chunked_iter(range(paths), size)):
        rng = np.random.default_rng(derive_seed(seed, stream, b))
        count = len(chunk)
        noise = fgn(H, grid.steps, count * d, rng, method=method).reshape(count, d, grid.steps)
        noise *= grid.dt**H
        values = np.concatenate([np.zeros((count, d, 1)), np.cumsum(noise, axis=-1)], axis=-1)
        yield values


def sample_batch(
    H: float,
    grid: Grid,
    d: int,
    paths: int,
    seed: int,
    *,
    stream: int | str = 0,
    batch_size: Optional[int] = None,
) -> FbmPath:
    values = np.concatenate(
        list(iter_batches(H, grid, d, paths, seed, stream=stream, batch_size=batch_size))
    )
    return FbmPath(grid, values, H, seed)
