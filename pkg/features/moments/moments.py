from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import permutations
from logging import getLogger
from typing import Any, Literal, Optional, Sequence

import numpy as np

import config
from features.fbm import Grid, iter_batches
from features.rough import iterated_integral
from tools import capture_time
from tools.cache import cache
from tools.exceptions import InputError, UnsupportedRegimeError, WordCapError

from .pairing import double_factorial, valid_matchings
from .simplex import Method, simplex_kernel_integral
from .words import MultiIndex, shuffle

log = getLogger("fracdev/moments")

__all__ = (
    "MomentResult",
    "PositivityReport",
    "GrowthProfile",
    "gamma_H",
    "closed_form_moment",
    "expected_iterated_integral",
    "permutation_sum_moment",
    "second_moment_iterated_integral",
    "simulated_iterated_integral",
    "derivative_split",
    "positivity_check",
    "scaled_moment",
    "growth_profile",
    "growth_word",
    "trivial_series_coefficient",
)

WordLike = MultiIndex | Sequence[int] | str


@dataclass(frozen=True, slots=True)
class MomentResult:
    value: float
    method: str
    error_estimate: float = 0.0
    matchings: int = 0

    def __post_init__(self) -> None:
        if self.error_estimate < 0:
            raise InputError("error estimates are non-negative")

    def to_document(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "method": self.method,
            "error_estimate": self.error_estimate,
            "matchings": self.matchings,
        }


EXACT_ZERO = MomentResult(0.0, Method.exact.label)


def _word(alpha: WordLike) -> MultiIndex:
    if isinstance(alpha, MultiIndex):
        return alpha

    if isinstance(alpha, str):
        return MultiIndex.parse(alpha)

    return MultiIndex.of(alpha)


def _check_cap(word: MultiIndex, cap: Optional[int] = None) -> None:
    cap = config.MOMENTS.MAX_LENGTH if cap is None else cap
    if word.length > cap:
        raise WordCapError(f"word {word} has length {word.length}, the cap is {cap}")


def gamma_H(H: float) -> float:
    """γ_H = H (2H - 1), the constant in ∂_s ∂_t R_H = γ_H |t - s|^{2H-2}."""

    return H * (2 * H - 1)


def closed_form_moment(alpha: WordLike) -> Optional[MomentResult]:
    """
    E∫dB^α when it is known for every H: zero for a letter used an odd
    number of times, 1 / k! for time only and E B_1^k / k! for one repeated
    noise letter. None otherwise.
    """

    word = _word(alpha)
    if word.has_odd_letter():
        return EXACT_ZERO

    letters = set(word.word)
    if len(letters) > 1:
        return None

    k = word.length
    count = double_factorial(k - 1) if word.norm else 1
    matchings = count if word.norm else 0
    return MomentResult(count / math.factorial(k), Method.exact.label, 0.0, matchings)


@cache(
    maxsize=config.MOMENTS.CACHE_SIZE,
    key=lambda word, H, tol: (word.canonical(), H, tol),
)
def _pairing_moment(word: MultiIndex, H: float, tol: float) -> MomentResult:
    closed = closed_form_moment(word)
    if closed is not None:
        return closed

    matchings = valid_matchings(word)
    total = 0.0
    error = 0.0
    method = Method.exact
    for matching in matchings:
        part = simplex_kernel_integral(word.length, matching, H, tol=tol)
        total += part.value
        error += part.error
        method = max(method, part.method)

    scale = gamma_H(H) ** (word.norm // 2)
    log.debug(f"E∫dB^({word}) at H={H} from {len(matchings)} matchings ({method.label}).")
    return MomentResult(total * scale, method.label, error * scale, len(matchings))


def expected_iterated_integral(
    alpha: WordLike,
    H: float,
    *,
    tol: float = 1e-6,
    method: Literal["pairing", "mc"] = "pairing",
    paths: Optional[int] = None,
    steps: Optional[int] = None,
    seed: Optional[int] = None,
) -> MomentResult:
    """
    E ∫_{0<t_1<...<t_k<1} dB^{α_1}_{t_1} ... dB^{α_k}_{t_k}.

    The pairing method sums, over matchings of the noise positions that
    pair equal letters, γ_H^{|α|/2} times the simplex integral of the
    product of |t_q - t_p|^{2H-2}. The mc method simulates paths.
    """

    word = _word(alpha)
    _check_cap(word)
    if method == "mc":
        return simulated_iterated_integral(word, H, paths=paths, steps=steps, seed=seed)

    if not 0.5 < H < 1:
        raise UnsupportedRegimeError(
            f"the pairing formula needs 1/2 < H < 1, got {H}; use the mc method"
        )

    if word.norm % 2:
        return EXACT_ZERO

    return _pairing_moment(word, H, tol)


def permutation_sum_moment(alpha: WordLike, H: float, *, tol: float = 1e-6) -> float:
    """
    (γ_H / 2)^q / q! Σ over orderings s of the noise positions of
    Π_l δ(α_{s(2l-1)}, α_{s(2l)}) ∫ Π_l |t_{s(2l)} - t_{s(2l-1)}|^{2H-2}.
    Grows factorially; meant for words with at most six noise letters.
    """

    word = _word(alpha)
    if word.norm % 2:
        return 0.0

    if word.norm > 6:
        raise WordCapError("the permutation sum is limited to six noise letters")

    if not 0.5 < H < 1:
        raise UnsupportedRegimeError(f"the pairing formula needs 1/2 < H < 1, got {H}")

    q = word.norm // 2
    integrals: dict[tuple[tuple[int, int], ...], float] = {}
    total = 0.0
    for order in permutations(word.noise_positions):
        pairs = list(zip(order[0::2], order[1::2]))
        if any(word[p] != word[r] for p, r in pairs):
            continue

        key = tuple(sorted(tuple(sorted(pair)) for pair in pairs))
        if key not in integrals:
            integrals[key] = simplex_kernel_integral(word.length, key, H, tol=tol).value

        total += integrals[key]

    return (gamma_H(H) / 2) ** q / math.factorial(q) * total


def second_moment_iterated_integral(
    alpha: WordLike, H: float, *, tol: float = 1e-6
) -> MomentResult:
    """
    E |∫ dB^α|². A product of two iterated integrals over one simplex is the
    sum of the integrals over all shuffles of the two words, so the second
    moment is Σ_{w ∈ α ⧢ α} E ∫ dB^w.
    """

    word = _word(alpha)
    letters = set(word.word)
    m = word.length
    if len(letters) <= 1:
        # ∫ dB^{j...j} = B_1^m / m! and ∫ dt^{0...0} = 1 / m!
        value = 1.0 if letters in ({0}, set()) else float(double_factorial(2 * m - 1))
        return MomentResult(value / math.factorial(m) ** 2, Method.exact.label)

    _check_cap(word, config.MOMENTS.MAX_LENGTH // 2)
    total = 0.0
    error = 0.0
    method = Method.exact
    labels = {Method.exact.label: Method.exact, Method.quadrature.label: Method.quadrature}
    words = Counter(shuffle(word.word, word.word))
    for w, count in words.items():
        part = expected_iterated_integral(MultiIndex(w), H, tol=tol)
        total += count * part.value
        error += count * part.error_estimate
        method = max(method, labels.get(part.method, Method.monte_carlo))

    return MomentResult(total, method.label, error)


def simulated_iterated_integral(
    alpha: WordLike,
    H: float,
    *,
    paths: Optional[int] = None,
    steps: Optional[int] = None,
    seed: Optional[int] = None,
    t: float = 1.0,
) -> MomentResult:
    """Sample mean of the iterated integral of piecewise-linear fBm paths on [0, t]."""

    word = _word(alpha)
    paths = config.MOMENTS.SIM_PATHS if paths is None else paths
    steps = config.MOMENTS.SIM_STEPS if steps is None else steps
    seed = config.MOMENTS.MC_SEED if seed is None else seed
    if paths < 2:
        raise InputError("a standard error needs at least two paths")

    d = max(word.word, default=0) or 1
    grid = Grid(t, steps)
    total = 0.0
    total_sq = 0.0
    with capture_time(f"Simulated E∫dB^({word}) over {paths} paths", log):
        for batch in iter_batches(H, grid, d, paths, seed, stream=f"word:{word}"):
            values = iterated_integral(batch, word.word, grid.dt)
            total += float(values.sum())
            total_sq += float((values * values).sum())

    mean = total / paths
    var = max(total_sq / paths - mean * mean, 0.0) * paths / (paths - 1)
    return MomentResult(mean, Method.monte_carlo.label, math.sqrt(var / paths))


def derivative_split(alpha: WordLike, i: int, j: int) -> tuple[MultiIndex, MultiIndex]:
    """
    Letters before and after position j, where α_j = i: the Malliavin
    derivative D^i_u of ∫ dB^α picks one position carrying letter i and
    factors into an integral of the left word on [0, u] and of the right
    word on [u, t].
    """

    word = _word(alpha)
    if not 1 <= j <= word.length or word[j] != i or i == 0:
        raise InputError(f"position {j} of {word} does not carry noise letter {i}")

    return word.split(j)


@dataclass(frozen=True)
class PositivityReport:
    estimate: float
    stderr: float
    flagged: bool
    words: tuple[str, ...] = field(default=())

    def to_document(self) -> dict[str, Any]:
        return {
            "estimate": self.estimate,
            "stderr": self.stderr,
            "flagged": self.flagged,
            "words": list(self.words),
        }


def positivity_check(
    alphas: Sequence[WordLike],
    intervals: Sequence[tuple[float, float]],
    H: float,
    *,
    paths: int = 20_000,
    steps: int = 256,
    seed: int = 0,
    sigmas: Optional[float] = None,
) -> PositivityReport:
    """
    Monte Carlo estimate of E Π_i ∫_{[s_i, t_i]} dB^{α_i}. The estimate is
    flagged when it lies more than `sigmas` standard errors below zero.
    """

    if len(alphas) != len(intervals) or not alphas:
        raise InputError("need one interval per word")

    if not 0.5 < H < 1:
        raise UnsupportedRegimeError("positive correlation holds for H > 1/2")

    words = [_word(a) for a in alphas]
    horizon = max(t for _, t in intervals)
    grid = Grid(horizon, steps)
    windows = [(grid.index_of(s), grid.index_of(t)) for s, t in intervals]
    if any(a > b for a, b in windows):
        raise InputError("interval ends must not precede their starts")

    d = max((max(w.word, default=0) for w in words), default=0) or 1
    total = 0.0
    total_sq = 0.0
    for batch in iter_batches(H, grid, d, paths, seed, stream="positivity"):
        product = np.ones(batch.shape[0])
        for word, (a, b) in zip(words, windows):
            product *= iterated_integral(batch, word.word, grid.dt, start=a, stop=b)

        total += float(product.sum())
        total_sq += float((product * product).sum())

    mean = total / paths
    stderr = math.sqrt(max(total_sq / paths - mean * mean, 0.0) / max(paths - 1, 1))
    sigmas = config.HARNESS.NOISE_SIGMAS if sigmas is None else sigmas
    return PositivityReport(mean, stderr, mean < -sigmas * stderr, tuple(map(str, words)))


def scaled_moment(alpha: WordLike, H: float, t: float, *, tol: float = 1e-6) -> float:
    """E ∫_{Δ^k([0, t])} dB^α = t^{H|α| + k - |α|} E ∫_{Δ^k([0, 1])} dB^α."""

    if t < 0:
        raise InputError("time must be non-negative")

    word = _word(alpha)
    exponent = H * word.norm + word.zeros
    return t**exponent * expected_iterated_integral(word, H, tol=tol).value


@dataclass(frozen=True)
class GrowthProfile:
    """
    v_m = √(m!) (E|∫dB^{w_m}|²)^{1/2} for m = 1..m_max. K and C come from a
    log-linear fit of v_m over the first `fit_orders` orders, with C raised
    until the fitted orders lie under C K^m; the remaining orders must stay
    below (1 + tolerance) C K^m.
    """

    letters: tuple[int, ...]
    H: float
    values: tuple[float, ...]
    K: float
    C: float
    fit_orders: int
    tolerance: float

    @property
    def normalized(self) -> tuple[float, ...]:
        return tuple(v / (self.C * self.K**m) for m, v in enumerate(self.values, start=1))

    @property
    def violations(self) -> tuple[int, ...]:
        """Orders past the fit whose value exceeds the extrapolated bound."""

        return tuple(
            m
            for m, ratio in enumerate(self.normalized, start=1)
            if m > self.fit_orders and ratio > 1.0 + self.tolerance
        )

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.K) and not self.violations

    @classmethod
    def fit(
        cls,
        values: Sequence[float],
        *,
        letters: Sequence[int] = (),
        H: float = math.nan,
        fit_orders: Optional[int] = None,
        tolerance: float = 0.5,
    ) -> GrowthProfile:
        values = tuple(float(v) for v in values)
        fit_orders = max(2, len(values) // 2) if fit_orders is None else fit_orders
        if not 2 <= fit_orders <= len(values):
            raise InputError(f"need 2 <= fit_orders <= {len(values)}, got {fit_orders}")

        if any(not v > 0 or not math.isfinite(v) for v in values):
            raise InputError("growth values must be positive and finite")

        if tolerance < 0:
            raise InputError("tolerance must be non-negative")

        orders = np.arange(1, fit_orders + 1)
        logs = np.log(values[:fit_orders])
        slope, _ = np.polyfit(orders, logs, 1)
        C = float(np.exp(np.max(logs - slope * orders)))
        return cls(tuple(letters), H, values, float(np.exp(slope)), C, fit_orders, tolerance)

    def to_document(self) -> dict[str, Any]:
        return {
            "letters": list(self.letters),
            "H": self.H,
            "values": list(self.values),
            "K": self.K,
            "C": self.C,
            "fit_orders": self.fit_orders,
            "normalized": list(self.normalized),
            "violations": list(self.violations),
            "bounded": self.bounded,
        }


def growth_word(letters: int | Sequence[int], m: int) -> MultiIndex:
    """The first m letters of `letters` repeated: (1, 2) gives 1, 1 2, 1 2 1, ..."""

    cycle = (letters,) if isinstance(letters, int) else tuple(letters)
    if not cycle:
        raise InputError("a growth word needs at least one letter")

    return MultiIndex(tuple(cycle[i % len(cycle)] for i in range(m)))


def growth_profile(
    letters: int | Sequence[int],
    H: float,
    m_max: int = 6,
    *,
    fit_orders: Optional[int] = None,
    tolerance: float = 0.5,
) -> GrowthProfile:
    if m_max < 2:
        raise InputError("m_max must be at least 2")

    values = [
        math.sqrt(math.factorial(m))
        * math.sqrt(second_moment_iterated_integral(growth_word(letters, m), H).value)
        for m in range(1, m_max + 1)
    ]
    cycle = (letters,) if isinstance(letters, int) else tuple(letters)
    profile = GrowthProfile.fit(
        values, letters=cycle, H=H, fit_orders=fit_orders, tolerance=tolerance
    )
    if profile.violations:
        log.warning(f"Growth of {cycle} at H={H} exceeds C K^m at orders {profile.violations}.")

    return profile


def trivial_series_coefficient(k: int) -> float:
    """c_k = E(B_1^k) / k!: 1 / (2^{k/2} (k/2)!) for even k, 0 for odd k."""

    if k < 0:
        raise InputError("k must be non-negative")

    if k % 2:
        return 0.0

    return 1.0 / (2 ** (k // 2) * math.factorial(k // 2))


