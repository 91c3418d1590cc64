PROGRAM: str = "fracdev"
VERSION: str = "0.4.0"


class TREES:
    MAX_NODES: int = 8


class MOMENTS:
    MAX_LENGTH: int = 8
    CACHE_SIZE: int = 4096
    QUAD_EPSABS: float = 1e-13
    QUAD_EPSREL: float = 1e-11
    QUAD_LIMIT: int = 200
    MC_POINTS: int = 1_000_000
    MC_SEED: int = 20_240_611
    SIM_PATHS: int = 20_000
    SIM_STEPS: int = 256


class FBM:
    PSD_TOLERANCE: float = 1e-10
    BATCH_SIZE: int = 2048


class ROUGH:
    CLOSED_TOLERANCE: float = 1e-9
    DENSE_CHECK_POINTS: int = 65
    SAMPLED_QUADRUPLES: int = 100_000


class SOLVER:
    DIVERGENCE_BOUND: float = 1e8
    SCHEMES: tuple[str, ...] = ("euler", "heun", "rough")


class EXPANSION:
    EXPONENT_MERGE: float = 1e-12
    MC_PATHS: int = 20_000
    MC_STEPS: int = 256


class HARNESS:
    FAILURE_RATE: float = 0.001
    NOISE_SIGMAS: float = 3.0
    MIN_SLOPE_POINTS: int = 3
    AREA_REFINEMENT: int = 4


class LOGGING:
    LEVEL: str = "INFO"
    FILE: str | None = None
