from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from itertools import product
from logging import getLogger
from typing import Any, Callable, Literal, Mapping, Optional, Sequence

import config
from features.moments import (
    MomentResult,
    MultiIndex,
    closed_form_moment,
    expected_iterated_integral,
    simulated_iterated_integral,
)
from features.symbolic import SdeSpec, apply_D_alpha, elementary_differential
from features.trees import bracket_string, enumerate_lts, group_by_word
from tools import capture_time
from tools.exceptions import FracdevError, InputError
from tools.parser import evaluate as evaluate_expr

from .models import AggregateTerm, Expansion, ExpansionTerm, WordTerm

log = getLogger("fracdev/expansion")

__all__ = ("expand", "evaluate", "aggregate", "partial_sums", "word_form", "polynomial")

Form = Literal["trees", "words"]
MomentTable = dict[MultiIndex, MomentResult]


def _moment(
    word: MultiIndex,
    H: float,
    *,
    method: Literal["pairing", "mc"],
    tol: float,
    paths: int,
    steps: int,
    seed: int,
) -> MomentResult:
    if method == "mc":
        if word.has_odd_letter():
            return MomentResult(0.0, "exact-closed-form")

        return simulated_iterated_integral(word, H, paths=paths, steps=steps, seed=seed)

    closed = closed_form_moment(word)
    if closed is not None:
        return closed

    if H <= 0.5:
        return simulated_iterated_integral(word, H, paths=paths, steps=steps, seed=seed)

    return expected_iterated_integral(word, H, tol=tol)


def _operator_value(spec: SdeSpec, word: MultiIndex, point: Sequence[float]) -> float:
    return evaluate_expr(apply_D_alpha(spec, spec.f, word.reversed().word), point)


def expand(
    spec: SdeSpec,
    order: int,
    *,
    method: Literal["pairing", "mc"] = "pairing",
    tol: float = 1e-6,
    paths: Optional[int] = None,
    steps: Optional[int] = None,
    seed: int = 0,
    threads: int = 1,
    overrides: Optional[Mapping[tuple[int, ...], float]] = None,
    a: Optional[Sequence[float]] = None,
    form: Form = "trees",
) -> Expansion:
    """
    Every tree with at most order + 1 nodes under every slot assignment,
    with its elementary differential at `a` (the spec's initial point by
    default) and the expected iterated integral of its label word. For
    H <= 1/2 the moments without a closed form are simulated once per word
    and carry standard errors. `overrides` replaces the moment of the listed
    words.

    The "words" form sums the trees of each word up front: one term per word
    of length at most `order` with coefficient 𝒟^{α_m} ... 𝒟^{α_1} f(a).
    Words whose coefficient vanishes are left out, so high orders stay cheap
    for sparse vector fields.
    """

    if order < 0:
        raise InputError("expansion order must be non-negative")

    if form not in ("trees", "words"):
        raise InputError(f"unknown expansion form {form!r}")

    paths = config.EXPANSION.MC_PATHS if paths is None else paths
    steps = config.EXPANSION.MC_STEPS if steps is None else steps
    point = tuple(float(v) for v in (spec.a if a is None else a))
    overrides = {tuple(k): float(v) for k, v in (overrides or {}).items()}
    label = "monte-carlo" if method == "mc" or spec.H <= 0.5 else "pairing"

    def moments_of(words: list[MultiIndex], pool: ThreadPoolExecutor) -> MomentTable:
        canonical = {word: word.canonical() for word in words}
        distinct = sorted(set(canonical.values()), key=lambda w: (w.length, w.word))

        def moment_of(word: MultiIndex) -> MomentResult:
            try:
                return _moment(
                    word, spec.H, method=method, tol=tol, paths=paths, steps=steps, seed=seed
                )
            except FracdevError:
                log.error(f"Moment of word ({word}) failed.")
                raise

        results = dict(zip(distinct, pool.map(moment_of, distinct)))
        return {word: results[canonical[word]] for word in words}

    if form == "words":
        return _expand_words(spec, order, point, overrides, label, moments_of, threads)

    trees = enumerate_lts(order + 1)
    groups = group_by_word(trees, spec.d)
    pairs = [
        (word, tree, assignment) for word, items in groups.items() for tree, assignment in items
    ]

    def coefficient(item: tuple[MultiIndex, Any, tuple[int, ...]]) -> float:
        _, tree, assignment = item
        return elementary_differential(spec, tree, assignment, a)

    with capture_time(f"Expanded to order {order} over {len(pairs)} terms", log):
        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            moments = moments_of(list(groups), pool)
            coefficients = list(pool.map(coefficient, pairs))

    terms = []
    for (word, tree, assignment), value in zip(pairs, coefficients):
        result = moments[word]
        terms.append(
            ExpansionTerm(
                tree=tree.ident,
                bracket=bracket_string(tree),
                l=tree.l,
                assignment=tuple(assignment),
                word=word,
                coefficient=float(value),
                moment=overrides.get(word.word, result.value),
                moment_error=result.error_estimate,
                n=tree.s,
                m=tree.d,
                exponent=tree.stats(spec.H).rho,
            )
        )

    terms.sort(key=lambda term: (term.l, term.tree, term.assignment))
    return Expansion(spec, order, tuple(terms), label, point)


def _expand_words(
    spec: SdeSpec,
    order: int,
    point: tuple[float, ...],
    overrides: dict[tuple[int, ...], float],
    label: str,
    moments_of: Callable[[list[MultiIndex], ThreadPoolExecutor], MomentTable],
    threads: int,
) -> Expansion:
    words = [
        MultiIndex(w) for k in range(order + 1) for w in product(range(spec.d + 1), repeat=k)
    ]
    with capture_time(f"Expanded to order {order} over {len(words)} words", log):
        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            values = list(pool.map(lambda w: _operator_value(spec, w, point), words))
            kept = [(w, v) for w, v in zip(words, values) if v != 0.0]
            moments = moments_of([w for w, _ in kept], pool)

    log.debug(f"{len(words) - len(kept)} of {len(words)} words have a vanishing coefficient.")
    terms = tuple(
        ExpansionTerm(
            tree="",
            bracket="",
            l=word.length + 1,
            assignment=(),
            word=word,
            coefficient=float(value),
            moment=overrides.get(word.word, moments[word].value),
            moment_error=moments[word].error_estimate,
            n=word.norm,
            m=word.zeros,
            exponent=spec.H * word.norm + word.zeros,
        )
        for word, value in kept
    )
    return Expansion(spec, order, terms, label, point, form="words")


def evaluate(expansion: Expansion, t: float) -> float:
    if not 0 <= t <= expansion.spec.T:
        raise InputError(f"t = {t} outside [0, {expansion.spec.T}]")

    return math.fsum(term.value(t) for term in expansion.terms)


def aggregate(expansion: Expansion, merge: Optional[float] = None) -> list[AggregateTerm]:
    """
    Terms collected by exponent nH + m. Exponents closer than `merge` are one
    power; the bucket keeps every (n, m) that landed in it.
    """

    merge = config.EXPANSION.EXPONENT_MERGE if merge is None else merge
    buckets: list[tuple[float, set[tuple[int, int]], list[float], list[float]]] = []
    for term in sorted(expansion.terms, key=lambda term: (term.exponent, term.n)):
        if buckets and abs(term.exponent - buckets[-1][0]) < merge:
            bucket = buckets[-1]
        else:
            bucket = (term.exponent, set(), [], [])
            buckets.append(bucket)

        bucket[1].add((term.n, term.m))
        bucket[2].append(term.coefficient * term.moment)
        bucket[3].append(abs(term.coefficient) * term.moment_error)

    return [
        AggregateTerm(exponent, tuple(sorted(powers)), math.fsum(values), math.fsum(errors))
        for exponent, powers, values, errors in buckets
    ]


def _power_label(n: int, m: int) -> str:
    if (n, m) == (0, 0):
        return ""

    if (n, m) == (0, 1):
        return " t"

    exponent = " + ".join(p for p in (f"{n}H" if n else "", str(m) if m else "") if p)
    return f" t^({exponent})"


def polynomial(terms: Sequence[AggregateTerm]) -> str:
    parts = []
    for term in terms:
        if term.coefficient == 0.0:
            continue

        power = f" t^{term.exponent:g}" if term.merged else _power_label(*term.power)
        parts.append(f"{term.coefficient:.10g}{power}")

    return " + ".join(parts).replace("+ -", "- ") or "0"


def partial_sums(
    spec: SdeSpec, orders: Sequence[int], t: float, **options: Any
) -> list[dict[str, float]]:
    """Truncated series at `t` for each order, from a single expansion at the largest one."""

    if not orders:
        return []

    full = expand(spec, max(orders), **options)
    return [{"order": m, "value": evaluate(full.truncate(m), t)} for m in sorted(orders)]


def word_form(expansion: Expansion) -> list[WordTerm]:
    """
    Per label word: the sum of elementary differentials of its trees and
    𝒟^{α_m} ... 𝒟^{α_1} f(a), evaluated independently. The two agree.
    """

    if expansion.form != "trees":
        raise InputError("word sums need an expansion over trees")

    sums: dict[MultiIndex, list[float]] = {}
    moments: dict[MultiIndex, float] = {}
    for term in expansion.terms:
        sums.setdefault(term.word, []).append(term.coefficient)
        moments[term.word] = term.moment

    return [
        WordTerm(
            word=word,
            tree_sum=math.fsum(values),
            operator_value=_operator_value(expansion.spec, word, expansion.point),
            moment=moments[word],
            trees=len(values),
        )
        for word, values in sorted(sums.items(), key=lambda item: (item[0].length, item[0].word))
    ]
