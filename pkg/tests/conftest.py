from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from features.symbolic import McConfig, SdeSpec  # noqa: E402


@pytest.fixture
def linear_spec() -> SdeSpec:
    """dX = 0.1 X dt + 0.2 X dB with f(x) = x, one dimension."""

    return SdeSpec.from_strings(0.75, [1.0], ["0.1 * x1"], [["0.2 * x1"]], "x1")


@pytest.fixture
def trivial_spec() -> SdeSpec:
    """dX = dB started at 0."""

    return SdeSpec.from_strings(0.75, [0.0], ["0"], [["1"]], "x1^2")


@pytest.fixture
def two_noise_spec() -> SdeSpec:
    return SdeSpec.from_strings(
        0.7,
        [0.5, -0.2],
        ["0.1 * x2", "-0.1 * x1"],
        [["sin(x1)", "0.3"], ["0.2", "cos(x2)"]],
        "x1 * x2",
    )


@pytest.fixture
def small_mc() -> McConfig:
    return McConfig(paths=2_000, steps=32, seed=7, batch_size=500)


@pytest.fixture
def experiment_document() -> dict:
    return {
        "hurst": 0.75,
        "n": 1,
        "d": 1,
        "a": [1.0],
        "T": 1.0,
        "drift": ["0.1 * x1"],
        "diffusion": [["0.2 * x1"]],
        "f": "x1",
        "expansion": {"order": 2},
        "mc": {"paths": 1000, "steps": 16, "seed": 3},
        "moments": {"method": "pairing", "tol": 1e-6},
    }
