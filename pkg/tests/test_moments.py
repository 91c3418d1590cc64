from __future__ import annotations

import math
from itertools import permutations

import pytest

from features.moments import (
    GrowthProfile,
    MultiIndex,
    closed_form_moment,
    crosses,
    derivative_split,
    expected_iterated_integral,
    gauss_jacobi_pair_integral,
    growth_profile,
    growth_word,
    permutation_sum_moment,
    positivity_check,
    scaled_moment,
    second_moment_iterated_integral,
    shuffle,
    simplex_kernel_integral,
    simulated_iterated_integral,
    trivial_series_coefficient,
    valid_matchings,
)
from tools.exceptions import InputError, OddWordError, UnsupportedRegimeError, WordCapError


class TestMultiIndex:
    def test_parse(self):
        assert MultiIndex.parse("1, 0,2") == MultiIndex((1, 0, 2))
        assert MultiIndex.parse("()") == MultiIndex(())
        with pytest.raises(InputError):
            MultiIndex.parse("1,a")

    def test_negative_letter(self):
        with pytest.raises(InputError):
            MultiIndex((1, -1))

    def test_counts(self):
        word = MultiIndex((2, 0, 2, 1))
        assert word.norm == 3
        assert word.zeros == 1
        assert word.has_odd_letter()
        assert word.canonical() == MultiIndex((1, 0, 1, 2))
        assert word.reversed() == MultiIndex((1, 2, 0, 2))

    def test_shuffle_multiplicity(self):
        assert len(list(shuffle((1, 2), (3, 4, 5)))) == math.comb(5, 2)
        assert sorted(shuffle((1,), (2,))) == [(1, 2), (2, 1)]


class TestMatchings:
    def test_same_letter_pairs(self):
        assert valid_matchings((1, 2, 1, 2)) == [((1, 3), (2, 4))]
        assert len(valid_matchings((1, 1, 1, 1))) == 3
        assert len(valid_matchings((1, 0, 1, 1, 0, 1))) == 3

    def test_odd(self):
        with pytest.raises(OddWordError):
            valid_matchings((1, 2, 1))

    def test_crossing(self):
        assert crosses((1, 3), (2, 4))
        assert not crosses((1, 4), (2, 3))
        assert not crosses((1, 2), (3, 4))


class TestSimplexIntegral:
    def test_single_pair_closed_form(self):
        beta = 2 * 0.75 - 2
        value = simplex_kernel_integral(3, [(1, 3)], 0.75).value
        assert value == pytest.approx(1 / ((beta + 2) * (beta + 3)), rel=1e-12)

    @pytest.mark.parametrize("k, pair", [(2, (1, 2)), (4, (2, 4)), (5, (1, 3)), (6, (3, 6))])
    def test_gauss_jacobi_agrees(self, k, pair):
        H = 0.7
        exact = simplex_kernel_integral(k, [pair], H).value
        assert gauss_jacobi_pair_integral(k, pair, H) == pytest.approx(exact, rel=1e-9)

    def test_rejects_overlapping_pairs(self):
        with pytest.raises(InputError):
            simplex_kernel_integral(4, [(1, 2), (2, 3)], 0.75)

    def test_rejects_rough_regime(self):
        with pytest.raises(UnsupportedRegimeError):
            simplex_kernel_integral(2, [(1, 2)], 0.5)


class TestExpectedIteratedIntegral:
    @pytest.mark.parametrize(
        "word, value",
        [
            ((1, 1), 0.5),
            ((1, 1, 1, 1), 0.125),
            ((1, 2), 0.0),
            ((1, 0, 1), 0.1),
            ((1,), 0.0),
            ((1, 1, 1), 0.0),
            ((1, 2, 2, 0, 1), 0.0),
            ((0, 0), 0.5),
        ],
    )
    def test_golden(self, word, value):
        assert expected_iterated_integral(word, 0.75).value == pytest.approx(value, abs=1e-9)

    def test_single_letter_is_exact(self):
        result = expected_iterated_integral((2,) * 6, 0.62)
        assert result.value == pytest.approx(15 / math.factorial(6))
        assert result.method == "exact-closed-form"
        assert result.matchings == 15

    def test_closed_form_moment(self):
        assert closed_form_moment((1, 1, 1, 1)).value == pytest.approx(3 / 24)
        assert closed_form_moment((0, 0, 0)).value == pytest.approx(1 / 6)
        assert closed_form_moment(()).value == 1.0
        assert closed_form_moment((1, 2, 1)).value == 0.0
        assert closed_form_moment((1, 0, 1)) is None
        assert closed_form_moment((1, 2, 2, 1)) is None

    def test_relabelling_invariant(self):
        a = expected_iterated_integral((1, 2, 1, 2), 0.7).value
        b = expected_iterated_integral((2, 1, 2, 1), 0.7).value
        assert a == b

    @pytest.mark.parametrize("word", [(1, 0, 0, 1), (1, 2, 0, 1, 2), (1, 1, 0, 2, 2)])
    def test_time_reversal(self, word):
        H = 0.8
        forward = expected_iterated_integral(word, H).value
        backward = expected_iterated_integral(word[::-1], H).value
        assert forward == pytest.approx(backward, rel=1e-6)

    def test_shuffle_of_independent_squares(self):
        # E[∫dB^(1,1) ∫dB^(2,2)] = E[B_1^2 / 2] E[B_1^2 / 2]
        H = 0.7
        words = list(shuffle((1, 1), (2, 2)))
        total = math.fsum(expected_iterated_integral(w, H).value for w in words)
        assert total == pytest.approx(0.25, rel=1e-6)

    @pytest.mark.parametrize("word", [(1, 2, 1, 2), (1, 1, 2, 2), (1, 0, 2, 1, 2), (1, 2, 2, 1)])
    def test_permutation_sum_agrees(self, word):
        H = 0.72
        pairing = expected_iterated_integral(word, H).value
        assert permutation_sum_moment(word, H) == pytest.approx(pairing, rel=1e-6)

    def test_regime(self):
        with pytest.raises(UnsupportedRegimeError):
            expected_iterated_integral((1, 1), 0.4)

    def test_cap(self):
        with pytest.raises(WordCapError):
            expected_iterated_integral((1,) * 9, 0.75)

    def test_string_words(self):
        assert expected_iterated_integral("1,0,1", 0.75).value == pytest.approx(0.1)


class TestSecondMoment:
    @pytest.mark.parametrize("word, value", [((0,), 1.0), ((1,), 1.0), ((1, 1), 0.75)])
    def test_golden(self, word, value):
        assert second_moment_iterated_integral(word, 0.75).value == pytest.approx(value)

    @pytest.mark.parametrize("H", [0.6, 0.75, 0.9])
    def test_time_integral_of_fbm(self, H):
        # ∫dB^(1,0) = ∫_0^1 B_t dt, whose variance is 1 / (2H + 2)
        value = second_moment_iterated_integral((1, 0), H).value
        assert value == pytest.approx(1 / (2 * H + 2), rel=1e-6)

    def test_independent_letters(self):
        # E|∫dB^(1,2)|^2 over the shuffles of (1,2) with itself
        H = 0.75
        direct = math.fsum(
            expected_iterated_integral(w, H).value for w in shuffle((1, 2), (1, 2))
        )
        assert second_moment_iterated_integral((1, 2), H).value == pytest.approx(direct)


class TestSimulated:
    def test_single_letter(self):
        result = simulated_iterated_integral((1, 1), 0.6, paths=4_000, steps=32, seed=11)
        assert result.method == "monte-carlo"
        assert abs(result.value - 0.5) <= 4 * result.error_estimate

    def test_deterministic(self):
        a = simulated_iterated_integral((1, 0, 1), 0.7, paths=500, steps=16, seed=3)
        b = simulated_iterated_integral((1, 0, 1), 0.7, paths=500, steps=16, seed=3)
        assert a == b

    @pytest.mark.slow
    def test_against_pairing(self):
        H = 0.75
        exact = expected_iterated_integral((1, 0, 1), H).value
        result = simulated_iterated_integral((1, 0, 1), H, paths=40_000, steps=128, seed=5)
        assert abs(result.value - exact) <= 4 * result.error_estimate + 2e-3

    def test_mc_method_through_front_door(self):
        result = expected_iterated_integral((1, 1), 0.4, method="mc", paths=2_000, steps=16, seed=2)
        assert abs(result.value - 0.5) <= 4 * result.error_estimate

    def test_needs_two_paths(self):
        with pytest.raises(InputError):
            simulated_iterated_integral((1, 1), 0.7, paths=1)


class TestHelpers:
    def test_derivative_split(self):
        left, right = derivative_split((1, 0, 2, 1), 1, 4)
        assert left == MultiIndex((1, 0, 2))
        assert right == MultiIndex(())
        with pytest.raises(InputError):
            derivative_split((1, 0, 2, 1), 2, 1)

    def test_scaled_moment(self):
        assert scaled_moment((1, 0, 1), 0.75, 0.5) == pytest.approx(0.5**2.5 * 0.1)
        assert scaled_moment((1, 1), 0.75, 0.0) == 0.0

    @pytest.mark.parametrize("k", range(0, 9))
    def test_trivial_series_coefficient(self, k):
        expected = 0.0 if k % 2 else math.prod(range(k - 1, 0, -2)) / math.factorial(k)
        assert trivial_series_coefficient(k) == pytest.approx(expected)

    def test_growth_profile_single_letter(self):
        profile = growth_profile(1, 0.75, 8)
        # √(m!) ‖B_1^m / m!‖ = √((2m - 1)!! / m!)
        expected = [
            math.sqrt(math.prod(range(2 * m - 1, 0, -2)) / math.factorial(m)) for m in range(1, 9)
        ]
        assert profile.values == pytest.approx(expected)
        assert profile.fit_orders == 4
        assert profile.bounded
        assert profile.violations == ()
        assert max(profile.normalized[:4]) == pytest.approx(1.0)

    def test_growth_profile_flags_factorial_growth(self):
        profile = GrowthProfile.fit([math.factorial(m) for m in range(1, 9)], fit_orders=4)
        assert not profile.bounded
        assert profile.violations == (5, 6, 7, 8)
        assert profile.to_document()["bounded"] is False

    def test_growth_profile_accepts_geometric_growth(self):
        profile = GrowthProfile.fit([0.8 * 1.7**m for m in range(1, 9)], fit_orders=3)
        assert profile.K == pytest.approx(1.7)
        assert profile.C == pytest.approx(0.8)
        assert profile.bounded

    def test_growth_profile_mixed_word(self):
        profiles = {H: growth_profile((1, 0), H, 2) for H in (0.6, 0.9)}
        for H, profile in profiles.items():
            # E|∫_0^1 B_s ds|² = 1 / (2H + 2)
            assert profile.values[1] == pytest.approx(math.sqrt(2 / (2 * H + 2)), rel=1e-6)

        assert profiles[0.6].values[1] != pytest.approx(profiles[0.9].values[1])

    def test_growth_word(self):
        assert growth_word((1, 2), 5) == MultiIndex((1, 2, 1, 2, 1))
        assert growth_word(1, 3) == MultiIndex((1, 1, 1))
        with pytest.raises(InputError):
            growth_word((), 2)

    def test_growth_profile_rejects(self):
        with pytest.raises(InputError):
            GrowthProfile.fit([1.0, 2.0, 3.0], fit_orders=4)

        with pytest.raises(InputError):
            GrowthProfile.fit([1.0, 0.0, 3.0])

        with pytest.raises(InputError):
            growth_profile(1, 0.75, 1)

    def test_positivity(self):
        report = positivity_check(
            [(1, 1), (1, 1)], [(0.0, 0.5), (0.5, 1.0)], 0.7, paths=2_000, steps=64, seed=1
        )
        assert not report.flagged
        assert report.estimate > 0

    def test_positivity_checks_intervals(self):
        with pytest.raises(InputError):
            positivity_check([(1, 1)], [(0.5, 0.25)], 0.7, paths=10, steps=8)


def test_permutations_cover_matchings():
    word = MultiIndex((1, 2, 1, 2, 1, 1))
    count = sum(
        1
        for order in permutations(word.noise_positions)
        if all(word[p] == word[q] for p, q in zip(order[0::2], order[1::2]))
    )
    q = word.norm // 2
    assert count == len(valid_matchings(word)) * 2**q * math.factorial(q)
