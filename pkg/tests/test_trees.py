from __future__ import annotations

import math

import pytest

from features.moments import MultiIndex
from features.trees import (
    LabelledTree,
    bracket_string,
    count_at_level,
    count_up_to,
    enumerate_lts,
    group_by_word,
    iter_level,
    parse_bracket,
    trees_with_word,
)
from tools.exceptions import (
    BracketParseError,
    InputError,
    TreeCapacityError,
    UnassignedSlotError,
    UnsupportedRegimeError,
)


class TestCounts:
    @pytest.mark.parametrize("l", range(1, 7))
    def test_level_formula(self, l):
        assert count_at_level(l) == math.factorial(l - 1) * 2 ** (l - 1)
        assert sum(1 for _ in iter_level(l)) == count_at_level(l)

    def test_small_levels(self):
        assert [count_at_level(l) for l in range(1, 5)] == [1, 2, 8, 48]
        assert count_up_to(3) == 11

    def test_three_nodes(self):
        trees = enumerate_lts(3)
        assert len(trees) == 11
        assert len({t.ident for t in trees}) == 11
        assert trees[0].l == 1

    def test_capacity(self):
        with pytest.raises(TreeCapacityError):
            enumerate_lts(5, cap=4)

        with pytest.raises(InputError):
            enumerate_lts(0)


class TestLabelledTree:
    def test_build_and_stats(self):
        tree = LabelledTree.build((1, 1, 2), (1, 0, 1))
        assert tree.l == 4
        assert tree.s == 2
        assert tree.d == 1
        assert tree.children(1) == (2, 3)
        assert tree.children(2) == (4,)
        assert tree.stats(0.75).rho == pytest.approx(2 * 0.75 + 1)
        assert tree.is_stratonovich_class()

    def test_label_word(self):
        tree = LabelledTree.build((1, 1, 2), (1, 0, 1))
        assert tree.label_word((2, 1)) == MultiIndex((2, 0, 1))
        assert tree.word_template() == ("j1", "0", "j2")

    def test_missing_slot(self):
        tree = LabelledTree.build((1,), (1,))
        with pytest.raises(UnassignedSlotError):
            tree.label_word(())

    def test_non_monotone(self):
        with pytest.raises(InputError):
            LabelledTree.build((2,), (0,))

    def test_hurst_range(self):
        tree = LabelledTree.build((1,), (1,))
        with pytest.raises(UnsupportedRegimeError):
            tree.stats(0.3)


class TestBracket:
    def test_render(self):
        assert bracket_string(LabelledTree.build((), ())) == "γ^1"
        assert bracket_string(LabelledTree.build((1,), (0,))) == "(τ_0^2)^1"
        assert bracket_string(LabelledTree.build((1, 2), (1, 0))) == "({τ_0^3}_{j1}^2)^1"

    def test_deterministic_children_first(self):
        tree = LabelledTree.build((1, 1), (1, 0))
        assert bracket_string(tree) == "(τ_0^3, τ_{j1}^2)^1"

    def test_roundtrip_to_five_nodes(self):
        for tree in enumerate_lts(5):
            assert parse_bracket(bracket_string(tree)) == tree

    def test_ascii_aliases(self):
        assert parse_bracket("(tau_0^2)^1") == LabelledTree.build((1,), (0,))
        assert parse_bracket("gamma^1") == LabelledTree.build((), ())

    @pytest.mark.parametrize("text", ["(τ_0^2", "(τ_0^2, τ_0^2)^1", "[τ_0^2]^1", ""])
    def test_malformed(self, text):
        with pytest.raises(BracketParseError):
            parse_bracket(text)


class TestWords:
    def test_every_word_is_reached(self):
        d = 2
        groups = group_by_word(iter_level(4), d)
        assert len(groups) == (d + 1) ** 3
        assert sum(len(v) for v in groups.values()) == sum(
            (d**t.s) for t in iter_level(4)
        )

    def test_trees_with_word(self):
        found = trees_with_word((1, 0, 1))
        assert len(found) == math.factorial(3)
        assert all(t.label_word(a) == MultiIndex((1, 0, 1)) for t, a in found)
