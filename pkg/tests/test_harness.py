from __future__ import annotations

import math

import numpy as np
import pytest

from features.harness import (
    CRITERIA,
    DEFAULT_TIMES,
    Criterion,
    Moments,
    SuiteConfig,
    check_time_grid,
    fit_slope,
    iterated_integral_remainder_slope,
    load_suite_config,
    map_batches,
    mc_estimate,
    remainder_slope,
    run_suite,
    stderr_scaling,
    validate,
)
from features.harness.criteria import THREE_NODE_TREES
from features.moments import GrowthProfile
from features.symbolic import McConfig, SdeSpec
from features.trees import bracket_string, enumerate_lts, iter_level
from tools import dumps
from tools.exceptions import (
    InputError,
    McFailureError,
    SignalBelowNoiseError,
    UnsupportedRegimeError,
)
from tools.parser import parse


class TestMoments:
    def test_of(self):
        moments = Moments.of(np.array([1.0, 2.0, 3.0]))
        assert moments.mean == 2.0
        assert moments.stderr == pytest.approx(math.sqrt(1 / 3))

    def test_combine(self):
        parts = [Moments.of(np.array([1.0, 2.0])), Moments.of(np.array([3.0]))]
        assert Moments.combine(parts) == Moments.of(np.array([1.0, 2.0, 3.0]))

    def test_empty(self):
        assert math.isnan(Moments().mean)
        assert Moments.of(np.array([4.0])).stderr == 0.0

    def test_map_batches_keeps_order(self):
        batches = [np.full(3, k, dtype=float) for k in range(7)]
        assert map_batches(lambda b: float(b[0]), batches, threads=3) == list(range(7))


class TestSlopes:
    def test_power_law(self):
        times = [0.5, 0.25, 0.125, 0.0625]
        fit = fit_slope(times, [t**1.5 for t in times], [0.0] * 4, target=1.5)
        assert fit.status == "ok"
        assert fit.slope == pytest.approx(1.5)
        assert fit.within(1e-9)

    def test_noise_is_inconclusive(self):
        times = [0.5, 0.25, 0.125, 0.0625]
        fit = fit_slope(times, [1e-4] * 4, [1.0] * 4, target=1.0)
        assert fit.status == "inconclusive"
        assert fit.slope is None
        assert fit.meets(0.0)
        assert not fit.within(1.0)

        with pytest.raises(SignalBelowNoiseError):
            fit_slope(times, [1e-4] * 4, [1.0] * 4, target=1.0, strict=True)

    def test_meets_is_one_sided(self):
        times = [1.0, 0.5, 0.25]
        fit = fit_slope(times, [t**3 for t in times], [0.0] * 3, target=2.0)
        assert fit.meets(0.0)
        assert not fit.within(0.5)

    def test_time_grid(self):
        assert check_time_grid([0.1, 0.2, 0.2, 0.3, 0.4, 0.5]) == (0.5, 0.4, 0.3, 0.2, 0.1)
        with pytest.raises(InputError):
            check_time_grid([0.1, 0.2, 0.3, 0.4])

        with pytest.raises(InputError):
            check_time_grid([0.0, 0.1, 0.2, 0.3, 0.4])

    def test_time_integral_decay(self, trivial_spec):
        fit = iterated_integral_remainder_slope(
            (0, 0), parse("1", 1), trivial_spec.replace(H=0.4), DEFAULT_TIMES, paths=8
        )
        assert fit.slope == pytest.approx(2.0)

    def test_iterated_decay_needs_rough_regime(self, trivial_spec):
        with pytest.raises(UnsupportedRegimeError):
            iterated_integral_remainder_slope((1, 1), parse("1", 1), trivial_spec, DEFAULT_TIMES)

    @pytest.mark.slow
    def test_noise_integral_decay(self, trivial_spec):
        fit = iterated_integral_remainder_slope(
            (1, 1), parse("1", 1), trivial_spec.replace(H=0.4), DEFAULT_TIMES, paths=4_000
        )
        assert fit.within(0.15)


class TestMonteCarlo:
    def test_linear_mean(self, linear_spec, small_mc):
        estimate = mc_estimate(linear_spec, small_mc, t_values=(0.5, 1.0))
        point = estimate.at(1.0)
        assert point.paths == 2_000
        assert point.failed == 0
        assert abs(point.mean - math.exp(0.12)) <= 4 * point.stderr
        assert estimate.scheme == "heun"

    def test_reproducible_across_threads(self, linear_spec, small_mc):
        one = mc_estimate(linear_spec, small_mc, t_values=(0.5,))
        again = mc_estimate(linear_spec, small_mc, t_values=(0.5,))
        four = mc_estimate(linear_spec, small_mc, t_values=(0.5,), threads=4)
        assert one.points == again.points == four.points

    def test_seed_changes_estimate(self, linear_spec, small_mc):
        other = small_mc.model_copy(update={"seed": 8})
        a = mc_estimate(linear_spec, small_mc, t_values=(0.5,)).points[0]
        b = mc_estimate(linear_spec, other, t_values=(0.5,)).points[0]
        assert a.mean != b.mean

    def test_times_inside_horizon(self, linear_spec, small_mc):
        with pytest.raises(InputError):
            mc_estimate(linear_spec, small_mc, t_values=(1.5,))

        with pytest.raises(InputError):
            mc_estimate(linear_spec, small_mc).at(0.3)

    def test_failures_abort(self):
        spec = SdeSpec.from_strings(0.75, [1.0], ["x1^2"], [["0"]], "x1", T=3.0)
        cfg = McConfig(paths=20, steps=300, seed=0, scheme="euler")
        with pytest.raises(McFailureError):
            mc_estimate(spec, cfg)

    def test_rough_scheme_below_half(self, trivial_spec):
        spec = trivial_spec.replace(H=0.4)
        cfg = McConfig(paths=4_000, steps=16, seed=3, area_refinement=2)
        point = mc_estimate(spec, cfg, t_values=(1.0,)).points[0]
        assert abs(point.mean - 1.0) <= 4 * point.stderr

    def test_stderr_scaling(self, linear_spec):
        ratios = stderr_scaling(linear_spec, McConfig(paths=500, steps=16, seed=1), 1)
        assert len(ratios) == 1
        assert 0.35 < ratios[0] < 0.65


class TestValidate:
    def test_report(self, linear_spec, small_mc):
        report = validate(linear_spec, small_mc, [1, 2])
        assert len(report.rows) == len(DEFAULT_TIMES)
        assert set(report.fits) == {1, 2}
        assert report.scheme == "heun"
        document = report.to_document()
        assert dumps(document)

    def test_needs_orders(self, linear_spec, small_mc):
        with pytest.raises(InputError):
            validate(linear_spec, small_mc, [])

    @pytest.mark.slow
    def test_remainder_decay(self):
        spec = SdeSpec.from_strings(0.75, [1.0], ["0.5*x1"], [["0.4*x1"]], "x1")
        cfg = McConfig(paths=20_000, steps=128, seed=0)
        fit = remainder_slope(spec, 1, DEFAULT_TIMES, cfg)
        assert fit.meets(0.15)


class TestSuite:
    def test_empty(self):
        report = run_suite(SuiteConfig(criteria=()))
        assert report.passed
        assert report.results == ()

    def test_profiles(self):
        quick = SuiteConfig().selected()
        full = SuiteConfig(profile="full").selected()
        assert "tree-census" in quick
        assert "moment-growth" not in quick
        assert set(quick) < set(full) == set(CRITERIA)

    def test_tree_census(self):
        report = run_suite(SuiteConfig(criteria=("tree-census",)))
        assert report.passed
        assert report.results[0].details["trees"] == 11
        assert sorted(report.results[0].details["brackets"]) == sorted(THREE_NODE_TREES)

    def test_tree_census_catches_duplicates(self, monkeypatch):
        trees = enumerate_lts(3)
        monkeypatch.setattr(
            "features.harness.criteria.enumerate_lts", lambda n: [*trees[:-1], trees[0]]
        )
        report = run_suite(SuiteConfig(criteria=("tree-census",)))
        assert report.failed == ["tree-census"]
        assert report.results[0].details["missing"] == [bracket_string(trees[-1])]

    def test_tree_census_catches_foreign_trees(self, monkeypatch):
        trees = enumerate_lts(3)
        stranger = next(iter_level(4))
        monkeypatch.setattr(
            "features.harness.criteria.enumerate_lts", lambda n: [*trees[:-1], stranger]
        )
        report = run_suite(SuiteConfig(criteria=("tree-census",)))
        assert report.failed == ["tree-census"]
        assert report.results[0].details["unexpected"] == [bracket_string(stranger)]

    def test_corrupted_moment_fails_by_name(self):
        config = SuiteConfig(criteria=("moment-golden",), moment_overrides={"1,1": 0.4})
        report = run_suite(config)
        assert not report.passed
        assert report.failed == ["moment-golden"]
        assert report.to_document()["failed"] == ["moment-golden"]

    def test_other_criteria_keep_running(self):
        config = SuiteConfig(
            criteria=("moment-golden", "tree-census"), moment_overrides={"1,1": 0.4}
        )
        report = run_suite(config)
        assert [r.name for r in report.results] == ["moment-golden", "tree-census"]
        assert report.failed == ["moment-golden"]

    def test_error_marks_failure(self, monkeypatch):
        def broken(cfg):
            raise InputError("broken on purpose")

        monkeypatch.setitem(CRITERIA, "broken", Criterion("broken", "quick", "raises", broken))
        report = run_suite(SuiteConfig(criteria=("broken",)))
        assert report.failed == ["broken"]
        assert report.results[0].error == "InputError: broken on purpose"

    def test_unknown_criterion(self):
        with pytest.raises(InputError):
            run_suite(SuiteConfig(criteria=("no-such-check",)))

    def test_unknown_criteria_named(self):
        with pytest.raises(InputError, match="unknown criteria: first, second and third"):
            SuiteConfig(criteria=("tree-census", "first", "second", "third")).selected()

    def test_config_file(self, tmp_path):
        path = tmp_path / "suite.json"
        path.write_bytes(dumps({"profile": "full", "criteria": ["tree-census"], "seed": 4}))
        config = load_suite_config(path)
        assert config.profile == "full"
        assert config.seed == 4
        assert config.selected() == ["tree-census"]

    def test_config_rejects(self):
        with pytest.raises(InputError):
            load_suite_config({"profile": "quick", "colour": "red"})

        with pytest.raises(InputError):
            load_suite_config({"moment_overrides": {"1,x": 0.5}})

    @pytest.mark.slow
    @pytest.mark.parametrize(
        "name",
        [
            "moment-golden",
            "expansion-m2",
            "trivial-series",
            "remainder-rough",
            "rough-calculus",
            "area-chen",
            "variational",
        ],
    )
    def test_quick_criteria_pass(self, name):
        report = run_suite(SuiteConfig(criteria=(name,)))
        assert report.passed, report.results[0].details

    def test_trivial_series_reaches_order_eight(self):
        report = run_suite(SuiteConfig(criteria=("trivial-series",)))
        details = report.results[0].details
        assert details["word_order"] == 8
        assert details["max_relative_error"]["words"] <= 1e-12
        assert report.passed, details

    def test_moment_growth_flags_fast_growth(self, monkeypatch):
        factorial = GrowthProfile.fit([math.factorial(m) for m in range(1, 9)], fit_orders=4)
        monkeypatch.setattr(
            "features.harness.criteria.growth_profile", lambda *args, **kwargs: factorial
        )
        report = run_suite(SuiteConfig(criteria=("moment-growth",)))
        assert report.failed == ["moment-growth"]
        profiles = report.results[0].details["profiles"]
        assert all(profile["violations"] == [5, 6, 7, 8] for profile in profiles)

    @pytest.mark.slow
    def test_moment_growth_passes(self):
        report = run_suite(SuiteConfig(criteria=("moment-growth",)))
        assert report.passed, report.results[0].details
