from __future__ import annotations

import math

import pytest

from features.expansion import (
    aggregate,
    evaluate,
    expand,
    partial_sums,
    polynomial,
    report,
    word_form,
)
from features.symbolic import SdeSpec, second_order_closed_form
from tools.exceptions import InputError


def by_power(expansion):
    return {term.power: term for term in aggregate(expansion)}


class TestSecondOrder:
    @pytest.mark.parametrize("spec_name", ["linear_spec", "two_noise_spec"])
    def test_matches_closed_form(self, spec_name, request):
        spec = request.getfixturevalue(spec_name)
        powers = by_power(expand(spec, 2))
        closed = second_order_closed_form(spec)
        for key, term in powers.items():
            assert term.coefficient == pytest.approx(closed.get(key, 0.0), rel=1e-10, abs=1e-12)

    def test_other_point(self, two_noise_spec):
        a = (0.1, 0.9)
        powers = by_power(expand(two_noise_spec, 2, a=a))
        closed = second_order_closed_form(two_noise_spec, a)
        assert powers[(2, 0)].coefficient == pytest.approx(closed[(2, 0)], rel=1e-10)

    def test_exponents(self, linear_spec):
        exponents = [term.exponent for term in aggregate(expand(linear_spec, 2))]
        assert exponents == pytest.approx([0.0, 0.75, 1.0, 1.5, 1.75, 2.0])


class TestWordForm:
    def test_tree_sums_match_operators(self, two_noise_spec):
        for term in word_form(expand(two_noise_spec, 3)):
            assert term.tree_sum == pytest.approx(term.operator_value, rel=1e-9, abs=1e-12)

    def test_tree_counts(self, linear_spec):
        counts = {term.word.word: term.trees for term in word_form(expand(linear_spec, 3))}
        assert counts[(1,)] == 1
        assert counts[(1, 1)] == 2
        assert counts[(1, 1, 1)] == 6


class TestWordExpansion:
    def test_agrees_with_trees(self, two_noise_spec):
        trees = by_power(expand(two_noise_spec, 3))
        words = by_power(expand(two_noise_spec, 3, form="words"))
        assert set(words) <= set(trees)
        for key, term in trees.items():
            got = words[key].coefficient if key in words else 0.0
            assert got == pytest.approx(term.coefficient, rel=1e-9, abs=1e-12)

    def test_high_order_trivial_series(self):
        spec = SdeSpec.from_strings(0.7, [0.3], ["0"], [["1"]], "exp(x1)")
        expansion = expand(spec, 8, form="words")
        assert len(expansion.terms) == 9
        powers = by_power(expansion)
        assert powers[(8, 0)].coefficient == pytest.approx(math.exp(0.3) / 384)
        assert powers[(7, 0)].coefficient == 0.0
        assert len(expansion.truncate(4).terms) == 5

    def test_word_sums_need_trees(self, trivial_spec):
        with pytest.raises(InputError):
            word_form(expand(trivial_spec, 2, form="words"))

    def test_unknown_form(self, trivial_spec):
        with pytest.raises(InputError):
            expand(trivial_spec, 2, form="forest")

    def test_report(self, trivial_spec):
        document, tables = report(expand(trivial_spec, 2, form="words"))
        assert document["form"] == "words"
        assert document["polynomial"] == "1 t^(2H)"
        assert all(term["bracket"] == "" for term in document["terms"])


class TestAggregate:
    def test_merged_exponents_keep_every_power(self, linear_spec):
        expansion = expand(linear_spec, 4, form="words")
        buckets = {round(t.exponent, 9): t for t in aggregate(expansion)}
        three = buckets[3.0]
        assert three.merged
        assert three.powers == ((0, 3), (4, 0))
        assert three.to_document()["powers"] == [[0, 3], [4, 0]]
        with pytest.raises(InputError):
            three.power

        assert polynomial([three]).endswith(" t^3")

    def test_distinct_exponents_have_one_power(self, linear_spec):
        for term in aggregate(expand(linear_spec, 2)):
            assert not term.merged
            assert len(term.powers) == 1


class TestTrivialSeries:
    def test_coefficients(self, trivial_spec):
        powers = by_power(expand(trivial_spec.replace(H=0.7), 4))
        assert powers[(2, 0)].coefficient == pytest.approx(1.0)
        assert powers[(0, 0)].coefficient == 0.0
        assert powers[(4, 0)].coefficient == 0.0

    def test_exponential(self):
        spec = SdeSpec.from_strings(0.7, [0.3], ["0"], [["1"]], "exp(x1)")
        powers = by_power(expand(spec, 4))
        e = math.exp(0.3)
        assert powers[(0, 0)].coefficient == pytest.approx(e)
        assert powers[(2, 0)].coefficient == pytest.approx(e / 2)
        assert powers[(3, 0)].coefficient == 0.0
        assert powers[(4, 0)].coefficient == pytest.approx(e / 8)

    def test_partial_sums(self, trivial_spec):
        sums = partial_sums(trivial_spec, [0, 2], 0.5)
        assert [s["order"] for s in sums] == [0, 2]
        assert sums[0]["value"] == 0.0
        assert sums[1]["value"] == pytest.approx(0.5**1.5)

    def test_overrides(self, trivial_spec):
        powers = by_power(expand(trivial_spec, 2, overrides={(1, 1): 0.4}))
        assert powers[(2, 0)].coefficient == pytest.approx(0.8)

    def test_closed_form_moments_below_half(self, trivial_spec):
        expansion = expand(trivial_spec.replace(H=0.4), 2, paths=4_000, steps=16, seed=1)
        assert expansion.moment_method == "monte-carlo"
        term = by_power(expansion)[(2, 0)]
        assert term.coefficient == pytest.approx(1.0)
        assert term.error == 0.0

    def test_simulated_moments_below_half(self, linear_spec):
        expansion = expand(linear_spec.replace(H=0.4), 2, paths=4_000, steps=16, seed=1)
        mixed = [t for t in expansion.terms if t.word.word in ((1, 0), (0, 1))]
        assert mixed
        assert all(t.moment_error > 0 for t in mixed)
        squares = [t for t in expansion.terms if t.word.word == (1, 1)]
        assert all(t.moment == 0.5 and t.moment_error == 0.0 for t in squares)


class TestExpansion:
    def test_evaluate(self, linear_spec):
        expansion = expand(linear_spec, 2)
        assert evaluate(expansion, 0.0) == 1.0
        closed = second_order_closed_form(linear_spec, t=0.1)
        assert evaluate(expansion, 0.1) == pytest.approx(math.fsum(closed.values()), rel=1e-12)
        with pytest.raises(InputError):
            evaluate(expansion, 2.0)

    def test_truncate(self, linear_spec):
        expansion = expand(linear_spec, 2)
        first = expansion.truncate(1)
        assert first.order == 1
        assert all(term.l <= 2 for term in first.terms)
        assert len(first.terms) < len(expansion.terms)
        assert first.remainder_order == pytest.approx(1.5)

    def test_negative_order(self, linear_spec):
        with pytest.raises(InputError):
            expand(linear_spec, -1)

    def test_threads_agree(self, two_noise_spec):
        one = expand(two_noise_spec, 2)
        four = expand(two_noise_spec, 2, threads=4)
        assert [t.coefficient for t in one.terms] == [t.coefficient for t in four.terms]


class TestReport:
    def test_document(self, trivial_spec):
        expansion = expand(trivial_spec, 2)
        document, tables = report(expansion)
        assert document["polynomial"] == "1 t^(2H)"
        assert document["term_count"] == len(expansion.terms)
        assert len(document["terms"]) == len(expansion.terms)
        assert len(tables) == 2

    def test_prune_zero(self, trivial_spec):
        expansion = expand(trivial_spec, 2)
        document, _ = report(expansion, prune_zero=True)
        assert document["term_count"] == len(expansion.terms)
        assert 0 < len(document["terms"]) < len(expansion.terms)
        assert all(term["moment"] != 0.0 for term in document["terms"])
