"""
The acceptance criteria. Each criterion is a function of the suite
configuration returning a pass flag and a JSON-ready detail mapping;
`quick` criteria run in every profile, `full` ones only in the full profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product
from typing import Any, Callable, Literal

import numpy as np

from features.expansion import aggregate, expand
from features.fbm import Grid, levy_area, sample, sample_batch, subsample
from features.moments import (
    MultiIndex,
    expected_iterated_integral,
    growth_profile,
    second_moment_iterated_integral,
    simulated_iterated_integral,
)
from features.rough import (
    ControlledPath,
    coboundary,
    compose_controlled,
    decompose,
    delta1,
    dyadic_holder_seminorm,
    dyadic_holder_seminorm3,
    ito_refinement,
    iterated_sum,
    join,
    ordered,
    sew,
)
from features.solver import solve_young, variational_path
from features.symbolic import McConfig, SdeSpec, partial, second_order_closed_form
from features.trees import bracket_string, count_at_level, enumerate_lts, iter_level, parse_bracket
from tools.parser import evaluate, parse

from .estimate import mc_estimate
from .slopes import iterated_integral_remainder_slope, remainder_slope
from .validate import DEFAULT_TIMES

__all__ = (
    "Criterion",
    "CRITERIA",
    "criterion",
    "GOLDEN_MOMENTS",
    "GOLDEN_SECOND_MOMENTS",
    "THREE_NODE_TREES",
)

Profile = Literal["quick", "full"]
Outcome = tuple[bool, dict[str, Any]]

# E∫dB^α over the unit simplex at H = 0.75.
GOLDEN_MOMENTS: dict[tuple[int, ...], float] = {
    (1, 1): 0.5,
    (1, 1, 1, 1): 0.125,
    (1, 2): 0.0,
    (1, 0, 1): 0.1,
    (1,): 0.0,
    (1, 1, 1): 0.0,
    (1, 2, 2, 0, 1): 0.0,
}
GOLDEN_SECOND_MOMENTS: dict[tuple[int, ...], float] = {(0,): 1.0, (1,): 1.0, (1, 1): 0.75}

# Every labelled tree on at most three nodes, in bracket notation.
THREE_NODE_TREES: tuple[str, ...] = (
    "γ^1",
    "(τ_{j1}^2)^1",
    "(τ_0^2)^1",
    "(τ_{j1}^2, τ_{j2}^3)^1",
    "({τ_{j2}^3}_{j1}^2)^1",
    "([τ_{j1}^3]^2)^1",
    "({τ_0^3}_{j1}^2)^1",
    "(τ_0^2, τ_{j1}^3)^1",
    "(τ_0^3, τ_{j1}^2)^1",
    "(τ_0^2, τ_0^3)^1",
    "([τ_0^3]^2)^1",
)


@dataclass(frozen=True)
class Criterion:
    name: str
    profile: Profile
    description: str
    run: Callable[[Any], Outcome]


CRITERIA: dict[str, Criterion] = {}


def criterion(name: str, profile: Profile, description: str) -> Callable:
    def decorator(fn: Callable[[Any], Outcome]) -> Callable[[Any], Outcome]:
        CRITERIA[name] = Criterion(name, profile, description, fn)
        return fn

    return decorator


def _trivial(H: float, f: str, a: float = 0.0) -> SdeSpec:
    return SdeSpec.from_strings(H, [a], ["0"], [["1"]], f)


@criterion("tree-census", "quick", "tree counts per level and the eleven trees on three nodes")
def tree_census(cfg: Any) -> Outcome:
    trees = enumerate_lts(3)
    levels = range(1, 6 if cfg.quick else 7)
    counts = {l: sum(1 for _ in iter_level(l)) for l in levels}
    formula = {l: math.factorial(l - 1) * 2 ** (l - 1) for l in levels}
    brackets = [bracket_string(t) for t in trees]
    missing = sorted(set(THREE_NODE_TREES) - set(brackets))
    unexpected = sorted(set(brackets) - set(THREE_NODE_TREES))
    roundtrip = all(parse_bracket(b) == t for b, t in zip(brackets, trees))
    passed = (
        len(trees) == len(THREE_NODE_TREES)
        and len(set(brackets)) == len(brackets)
        and not missing
        and not unexpected
        and counts == formula
        and all(count_at_level(l) == formula[l] for l in levels)
        and roundtrip
    )
    return passed, {
        "trees": len(trees),
        "brackets": brackets,
        "missing": missing,
        "unexpected": unexpected,
        "counts": counts,
        "roundtrip": roundtrip,
    }


def _all_words(max_length: int, letters: int) -> list[MultiIndex]:
    seen = {
        MultiIndex(w).canonical()
        for k in range(1, max_length + 1)
        for w in product(range(letters + 1), repeat=k)
    }
    return sorted(seen, key=lambda w: (w.length, w.word))


@criterion("moment-golden", "quick", "golden expected iterated integrals and second moments")
def moment_golden(cfg: Any) -> Outcome:
    failures = []
    values = {}
    for word, golden in GOLDEN_MOMENTS.items():
        value = cfg.moment(word, lambda: expected_iterated_integral(word, 0.75).value)
        values[",".join(map(str, word))] = value
        if not abs(value - golden) <= 1e-6:
            failures.append({"word": list(word), "value": value, "golden": golden})

    for word, golden in GOLDEN_SECOND_MOMENTS.items():
        value = second_moment_iterated_integral(word, 0.75).value
        if not abs(value - golden) <= 1e-6:
            failures.append({"second": list(word), "value": value, "golden": golden})

    checked = 0
    if not cfg.quick:
        for H in (0.6, 0.75, 0.9):
            for word in _all_words(4, 2):
                exact_value = expected_iterated_integral(word, H).value
                sim = simulated_iterated_integral(word, H, seed=cfg.seed)
                checked += 1
                if abs(exact_value - sim.value) > 3 * sim.error_estimate + 1e-3:
                    failures.append(
                        {
                            "word": list(word.word),
                            "H": H,
                            "pairing": exact_value,
                            "simulated": sim.value,
                        }
                    )

    return not failures, {"values": values, "cross_checked": checked, "failures": failures}


SECOND_ORDER_SPEC = dict(
    H=0.75,
    a=[0.3, -0.2],
    drift=["sin(x1)*x2", "cos(x2)"],
    diffusion=[["1 + 0.5*sin(x2)", "0.3*x1"], ["0.2*cos(x1)", "tanh(x1)"]],
    f="x1^2*x2 + exp(0.5*x2)",
)


@criterion("expansion-m2", "quick", "order-two expansion against the closed-form display")
def expansion_m2(cfg: Any) -> Outcome:
    spec = SdeSpec.from_strings(**SECOND_ORDER_SPEC)
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    points = 5 if cfg.quick else 20
    for _ in range(points):
        a = rng.uniform(-1.0, 1.0, size=spec.n)
        powers = aggregate(expand(spec, 2, a=a, overrides=cfg.word_overrides))
        closed = second_order_closed_form(spec, a)
        for term in powers:
            want = closed.get(term.power, 0.0)
            worst = max(worst, abs(term.coefficient - want) / max(1.0, abs(want)))

    return worst <= 1e-10, {"points": points, "max_relative_error": worst}


@criterion("trivial-series", "quick", "dX = dB: coefficients c_k f^(k)(a)")
def trivial_series(cfg: Any) -> Outcome:
    a = 0.3
    order = 4 if cfg.quick else 5
    word_order = 8
    worst = {"trees": 0.0, "words": 0.0}
    for f in ("x1^2", "x1^4", "exp(x1)"):
        spec = _trivial(0.7, f, a)
        targets = {
            k: (math.prod(range(k - 1, 0, -2)) / math.factorial(k) if k % 2 == 0 else 0.0)
            * evaluate(partial(spec.f, (1,) * k), spec.a)
            for k in range(0, word_order + 1)
        }
        for form, m in (("trees", order), ("words", word_order)):
            expansion = expand(spec, m, overrides=cfg.word_overrides, form=form)
            for term in aggregate(expansion):
                n, zeros = term.power
                if zeros == 0:
                    want = targets[n]
                    error = abs(term.coefficient - want) / max(1.0, abs(want))
                    worst[form] = max(worst[form], error)

    passed = all(value <= 1e-12 for value in worst.values())
    return passed, {"tree_order": order, "word_order": word_order, "max_relative_error": worst}


@criterion("mc-consistency", "full", "E B_t^2 = t^(2H) by Monte Carlo")
def mc_consistency(cfg: Any) -> Outcome:
    spec = _trivial(0.75, "x1^2")
    mc = McConfig(paths=10_000 if cfg.quick else 100_000, steps=16, seed=cfg.seed, scheme="heun")
    estimate = mc_estimate(spec, mc, t_values=(0.25, 0.5, 1.0), threads=cfg.threads)
    rows = [{**p.to_document(), "exact": p.t ** (2 * spec.H)} for p in estimate.points]
    passed = all(abs(r["mean"] - r["exact"]) <= 3 * r["stderr"] for r in rows)
    return passed, {"points": rows}


@criterion("remainder-young", "full", "remainder decay at least (m + 1) H for H > 1/2")
def remainder_young(cfg: Any) -> Outcome:
    spec = SdeSpec.from_strings(0.75, [1.0], ["0.5*x1"], [["0.4*x1"]], "x1")
    mc = McConfig(paths=20_000 if cfg.quick else 200_000, steps=128, seed=cfg.seed, scheme="heun")
    estimate = mc_estimate(spec, mc, t_values=DEFAULT_TIMES, threads=cfg.threads)
    full = expand(spec, 2, overrides=cfg.word_overrides)
    fits = {
        m: remainder_slope(spec, m, DEFAULT_TIMES, mc, mc=estimate, expansion=full.truncate(m))
        for m in (1, 2)
    }
    passed = all(fit.meets(0.15) for fit in fits.values())
    return passed, {str(m): fit.to_document() for m, fit in fits.items()}


@criterion("remainder-rough", "quick", "iterated integral decay t^(r - |α|(1 - H)) at H = 0.4")
def remainder_rough(cfg: Any) -> Outcome:
    spec = _trivial(0.4, "x1")
    one = parse("1", 1)
    paths = 4_000 if cfg.quick else 20_000
    noise = iterated_integral_remainder_slope(
        (1, 1), one, spec, DEFAULT_TIMES, paths=paths, seed=cfg.seed, threads=cfg.threads
    )
    time = iterated_integral_remainder_slope(
        (0, 0), one, spec, DEFAULT_TIMES, paths=64, seed=cfg.seed
    )
    passed = noise.within(0.15) and time.within(0.02)
    return passed, {"(1,1)": noise.to_document(), "(0,0)": time.to_document()}


@criterion("rough-calculus", "quick", "coboundaries, product rules, sewing and the Itô residual")
def rough_calculus(cfg: Any) -> Outcome:
    small = sample(0.75, Grid(1.0, 16), 2, cfg.seed)
    x, y = small.values
    scale = 1.0 + float(np.max(np.abs(small.values)))
    details: dict[str, Any] = {}

    g2 = iterated_sum(x, y)
    details["delta_delta_path"] = float(np.max(np.abs(coboundary(delta1(x), 2))))
    details["delta_delta_increment"] = float(np.max(np.abs(coboundary(coboundary(g2, 2), 3))))

    dx, dy = delta1(x), delta1(y)
    rules = {
        "C1.C1": coboundary(join(x, y, 1, 1), 1) - (join(dx, y, 2, 1) + join(x, dy, 1, 2)),
        "C2.C1": coboundary(join(g2, y, 2, 1), 2)
        - (join(coboundary(g2, 2), y, 3, 1) + join(g2, dy, 2, 2)),
        "C1.C2": coboundary(join(x, g2, 1, 2), 2)
        - (join(x, coboundary(g2, 2), 1, 3) - join(dx, g2, 2, 2)),
        "chen": coboundary(g2, 2) - join(dx, dy, 2, 2),
    }
    mask3 = ordered(x.size, 3)
    for name, defect in rules.items():
        details[name] = float(np.max(np.abs(defect if defect.ndim == 2 else defect[mask3])))

    path = sample(0.75, Grid(1.0, 64), 2, cfg.seed)
    f_path = np.cumsum(np.sin(np.arange(65.0)))
    g = delta1(f_path) + iterated_sum(*path.values)
    f, lam = decompose(g)
    mask2 = ordered(65, 2)
    details["reconstruction"] = float(np.max(np.abs((delta1(f) + lam - g)[mask2])))

    mu = 1.4
    h = coboundary(iterated_sum(*path.values), 2)
    C = dyadic_holder_seminorm3(h, mu / 2, mu, path.grid.times)
    bound = dyadic_holder_seminorm(sew(h), mu, path.grid.times)
    details["lambda_ratio"] = bound / C * (2**mu - 2)

    fine = sample(0.75, Grid(1.0, 1024), 1, cfg.seed)
    driver = ControlledPath.driver(fine)
    z = compose_controlled([parse("sin(x1)", 1)], driver)
    m = compose_controlled([parse("cos(x1)", 1)], driver)
    m = ControlledPath(m.z[:, :, None], m.zeta[:, :, None, :], m.x, m.times)
    refinement = ito_refinement(parse("x1^2", 1), z, m, fine, [32, 16, 8, 4, 2])
    residuals = [r["residual"] for r in refinement]
    details["ito_residuals"] = residuals

    exact_checks = [
        "delta_delta_path",
        "delta_delta_increment",
        "C1.C1",
        "C2.C1",
        "C1.C2",
        "chen",
        "reconstruction",
    ]
    passed = (
        all(details[key] <= 1e-12 * scale**3 for key in exact_checks)
        and details["lambda_ratio"] <= 1.02
        and all(b < a for a, b in zip(residuals, residuals[1:]))
    )
    return passed, details


@criterion("area-chen", "quick", "Chen's relation, symmetric part and scaling of the area")
def area_chen(cfg: Any) -> Outcome:
    path = sample(0.75, Grid(1.0, 256), 2, cfg.seed)
    area = levy_area(path, 1)
    merged = area.coarsen(4)
    direct = levy_area(path, 4)
    scale = 1.0 + float(np.max(np.abs(direct.area)))
    chen = float(np.max(np.abs(merged.area - direct.area)))
    symmetric = max(area.symmetric_defect(), direct.symmetric_defect())

    H = 0.75
    batch = sample_batch(H, Grid(1.0, 1024), 2, 400 if cfg.quick else 2000, cfg.seed)
    stats = []
    for block in (16, 32, 64):
        coarse = levy_area(subsample(batch, block // 16), 16)
        width = block * batch.grid.dt
        per_path = np.mean(coarse.area[..., 0, 1] ** 2, axis=-1) / width ** (4 * H)
        stderr = per_path.std(ddof=1) / math.sqrt(per_path.size)
        stats.append((float(per_path.mean()), float(stderr)))

    stable = all(
        abs(m1 - m2) <= 3 * math.hypot(e1, e2) for (m1, e1), (m2, e2) in combinations(stats, 2)
    )
    passed = chen <= 1e-12 * scale and symmetric <= 1e-12 * scale and stable
    return passed, {"chen": chen, "symmetric": symmetric, "scaled_area": stats}


@criterion("variational", "quick", "D_s X_t = σ(X_s) X_t / X_s for σ(x) = x")
def variational(cfg: Any) -> Outcome:
    spec = SdeSpec.from_strings(0.75, [1.0], ["0"], [["x1"]], "x1")
    steps = 1024 if cfg.quick else 4096
    path = sample(spec.H, Grid(1.0, steps), 1, cfg.seed)
    trajectory = solve_young(spec, path, "heun")
    s = 0.25
    D = variational_path(spec, trajectory, s, 1)
    start = path.grid.index_of(s)
    X = trajectory.states[0]
    # σ(X_s) X_t / X_s with σ(x) = x
    oracle = X[start:]
    error = float(np.max(np.abs(D.values[0, start:] - oracle) / np.abs(oracle)))
    before = float(np.max(np.abs(D.values[0, :start]), initial=0.0))
    return error < 0.02 and before == 0.0, {"relative_error": error, "before_s": before}


@criterion("moment-growth", "full", "√(m!) (E|∫dB^α|²)^(1/2) stays below a fitted C K^m")
def moment_growth(cfg: Any) -> Outcome:
    profiles = [growth_profile(1, 0.75, 8)]
    mixed_orders = 3 if cfg.quick else 4
    for letters in ((1, 0), (1, 2)):
        for H in (0.6, 0.9):
            profiles.append(growth_profile(letters, H, mixed_orders))

    passed = all(profile.bounded for profile in profiles)
    return passed, {"profiles": [profile.to_document() for profile in profiles]}
