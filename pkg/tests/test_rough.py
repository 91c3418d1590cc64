from __future__ import annotations

import numpy as np
import pytest

from features.fbm import Grid, levy_area, sample, sample_batch, subsample
from features.rough import (
    ControlledPath,
    coboundary,
    compensated_integral,
    compose_controlled,
    decompose,
    delta1,
    delta2,
    dyadic_holder_seminorm,
    dyadic_holder_seminorm3,
    holder_seminorm,
    ito_refinement,
    ito_residual,
    iterated_integral,
    iterated_sum,
    join,
    ordered,
    refinement_sequence,
    riemann_sums,
    sew,
    young_integral,
)
from tools.exceptions import IncompatibleGridError, InputError, NotClosedError
from tools.parser import parse


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


class TestCoboundary:
    def test_path(self, rng):
        g = rng.standard_normal(6)
        dg = delta1(g)
        assert dg[1, 4] == pytest.approx(g[4] - g[1])

    def test_two_increment(self, rng):
        h = rng.standard_normal((5, 5))
        dh = delta2(h)
        assert dh[0, 2, 4] == pytest.approx(h[0, 4] - h[0, 2] - h[2, 4])

    def test_delta_delta_vanishes(self, rng):
        g = rng.standard_normal(7)
        h = rng.standard_normal((7, 7))
        assert np.max(np.abs(delta2(delta1(g)))) < 1e-14
        assert np.max(np.abs(coboundary(delta2(h), 3))) < 1e-14

    def test_order_checked(self):
        with pytest.raises(InputError):
            coboundary(np.zeros((3, 3)), 3)

    def test_product_rule(self, rng):
        x = rng.standard_normal(8)
        y = rng.standard_normal(8)
        lhs = delta1(x * y)
        rhs = join(delta1(x), y, 2, 1) + join(x, delta1(y), 1, 2)
        np.testing.assert_allclose(lhs, rhs, atol=1e-13)

    def test_iterated_sum_coboundary(self, rng):
        f = rng.standard_normal(9)
        g = rng.standard_normal(9)
        mask = ordered(9, 3)
        lhs = delta2(iterated_sum(f, g))[mask]
        rhs = join(delta1(f), delta1(g), 2, 2)[mask]
        np.testing.assert_allclose(lhs, rhs, atol=1e-13)


class TestSeminorms:
    def test_linear_path(self):
        times = np.linspace(0.0, 1.0, 9)
        assert holder_seminorm(delta1(times), 1.0, times) == pytest.approx(1.0)
        assert dyadic_holder_seminorm(delta1(times), 1.0, times) == pytest.approx(1.0)

    def test_dyadic_needs_power_of_two(self):
        times = np.linspace(0.0, 1.0, 7)
        with pytest.raises(InputError):
            dyadic_holder_seminorm(delta1(times), 0.5, times)


class TestSewing:
    def test_inverse_of_delta(self, rng):
        g = np.triu(rng.standard_normal((17, 17)), k=1)
        h = delta2(g)
        lam = sew(h)
        mask = ordered(17, 3)
        np.testing.assert_allclose(delta2(lam)[mask], h[mask], atol=1e-12)
        assert np.all(np.diagonal(lam, offset=1) == 0.0)

    def test_decompose(self, rng):
        path = sample(0.75, Grid(1.0, 32), 2, seed=3)
        f_path = np.cumsum(rng.standard_normal(33))
        g = delta1(f_path) + iterated_sum(*path.values)
        f, lam = decompose(g)
        mask = ordered(33, 2)
        np.testing.assert_allclose((delta1(f) + lam)[mask], g[mask], atol=1e-12)
        assert f[0] == 0.0

    def test_riemann_sums_reach_the_increment(self, rng):
        path = sample(0.75, Grid(1.0, 16), 2, seed=3)
        f_path = np.cumsum(rng.standard_normal(17))
        g = delta1(f_path) + iterated_sum(*path.values)
        sums = riemann_sums(g)
        assert len(sums) == 5
        assert sums[-1] == pytest.approx(f_path[-1] - f_path[0])

    def test_not_closed(self, rng):
        h = rng.standard_normal((9, 9, 9))
        with pytest.raises(NotClosedError):
            sew(h)

    def test_dyadic_only(self):
        with pytest.raises(IncompatibleGridError):
            sew(np.zeros((7, 7, 7)))

    def test_lambda_bound(self):
        mu = 1.4
        path = sample(0.75, Grid(1.0, 64), 2, seed=0)
        h = delta2(iterated_sum(*path.values))
        C = dyadic_holder_seminorm3(h, mu / 2, mu, path.grid.times)
        bound = dyadic_holder_seminorm(sew(h), mu, path.grid.times)
        assert bound <= C / (2**mu - 2) * 1.02


class TestIntegrals:
    def test_young_riemann_sum(self):
        path = sample(0.75, Grid(1.0, 256), 1, seed=6)
        x = path.values[0]
        dx = np.diff(x)
        value = young_integral(x, x, path.grid)
        assert value == pytest.approx(0.5 * (x[-1] ** 2 - np.sum(dx * dx)), abs=1e-12)

    def test_young_stride(self):
        path = sample(0.75, Grid(1.0, 16), 1, seed=6)
        with pytest.raises(IncompatibleGridError):
            young_integral(path.values[0], path.values[0], path.grid, stride=3)

    def test_compensated_is_exact_for_the_driver(self):
        path = sample(0.4, Grid(1.0, 64), 1, seed=2)
        driver = ControlledPath.driver(path)
        end = path.values[0, -1]
        for block in (1, 4, 16):
            value = compensated_integral(driver, path, levy_area(path, block), 0.0, 1.0)
            assert value == pytest.approx(0.5 * end**2, abs=1e-12)

    def test_refinement_sequence(self):
        path = sample(0.4, Grid(1.0, 64), 1, seed=2)
        driver = ControlledPath.driver(path)
        records = refinement_sequence(driver, path, 0.0, 1.0, [1, 4, 16])
        assert [r["resolution"] for r in records] == [4, 16, 64]
        assert records[0]["change"] is None

    def test_ito_formula_for_a_square(self):
        path = sample(0.4, Grid(1.0, 64), 1, seed=2)
        driver = ControlledPath.driver(path)
        P = driver.points
        m = ControlledPath(np.ones((P, 1, 1)), np.zeros((P, 1, 1, 1)), driver.x, driver.times)
        residual = ito_residual(parse("x1^2", 1), driver, m, path, levy_area(path, 8))
        assert residual < 1e-12

    def test_ito_refinement_decreases(self):
        fine = sample(0.75, Grid(1.0, 1024), 1, seed=0)
        driver = ControlledPath.driver(fine)
        z = compose_controlled([parse("sin(x1)", 1)], driver)
        m = compose_controlled([parse("cos(x1)", 1)], driver)
        m = ControlledPath(m.z[:, :, None], m.zeta[:, :, None, :], m.x, m.times)
        records = ito_refinement(parse("x1^2", 1), z, m, fine, [32, 8, 2])
        residuals = [r["residual"] for r in records]
        assert all(b < a for a, b in zip(residuals, residuals[1:]))


class TestControlled:
    def test_driver(self):
        path = sample(0.6, Grid(1.0, 16), 2, seed=1)
        driver = ControlledPath.driver(path)
        assert driver.d == 2
        assert np.max(np.abs(driver.r)) == 0.0

    def test_batched_driver(self):
        with pytest.raises(InputError):
            ControlledPath.driver(sample_batch(0.6, Grid(1.0, 8), 1, 3, seed=1))

    def test_compose(self):
        path = sample(0.6, Grid(1.0, 16), 1, seed=1)
        z = compose_controlled([parse("sin(x1)", 1)], ControlledPath.driver(path))
        x = path.values[0]
        np.testing.assert_allclose(z.z[:, 0], np.sin(x))
        np.testing.assert_allclose(z.zeta[:, 0, 0], np.cos(x))

    def test_square(self):
        path = sample(0.4, Grid(1.0, 256), 1, seed=5)
        square = compose_controlled([parse("x1^2", 1)], ControlledPath.driver(path))
        x = path.values[0]
        np.testing.assert_allclose(square.zeta[:, 0, 0], 2 * x)
        # r̂_{st} = (δx_{st})²
        dx = x[None, :] - x[:, None]
        np.testing.assert_allclose(square.r[..., 0], dx**2, atol=1e-12)

    def test_square_remainder_norm_stays_finite(self):
        fine = sample(0.4, Grid(1.0, 1024), 1, seed=5)
        norms = {}
        for factor in (16, 1):
            driver = ControlledPath.driver(subsample(fine, factor))
            square = compose_controlled([parse("x1^2", 1)], driver)
            norms[factor] = (square.remainder_norm(0.6), square.remainder_norm(1.0))

        coarse, dense = norms[16], norms[1]
        assert np.isfinite(dense[0])
        # 2κ = 0.6 < 2H keeps the norm bounded; an exponent above 2H grows with the grid
        assert dense[0] / coarse[0] < 2.0
        assert dense[0] / coarse[0] < dense[1] / coarse[1]

    def test_shapes_checked(self):
        times = np.linspace(0, 1, 5)
        with pytest.raises(IncompatibleGridError):
            ControlledPath(np.zeros((4, 1)), np.zeros((4, 1, 1)), np.zeros((5, 1)), times)


class TestIteratedIntegral:
    def test_single_letter_is_power(self):
        batch = sample_batch(0.4, Grid(1.0, 32), 1, 20, seed=1)
        out = iterated_integral(batch.values, (1, 1, 1), batch.grid.dt)
        np.testing.assert_allclose(out, batch.values[:, 0, -1] ** 3 / 6, atol=1e-12)

    def test_time_letters(self):
        batch = sample_batch(0.4, Grid(0.5, 16), 1, 3, seed=1)
        out = iterated_integral(batch.values, (0, 0), batch.grid.dt)
        np.testing.assert_allclose(out, 0.5**2 / 2)

    def test_chen_split(self):
        batch = sample_batch(0.6, Grid(1.0, 16), 2, 5, seed=1)
        dt = batch.grid.dt
        whole = iterated_integral(batch.values, (1, 2), dt)
        left = iterated_integral(batch.values, (1, 2), dt, stop=8)
        right = iterated_integral(batch.values, (1, 2), dt, start=8)
        x1 = iterated_integral(batch.values, (1,), dt, stop=8)
        y2 = iterated_integral(batch.values, (2,), dt, start=8)
        np.testing.assert_allclose(whole, left + right + x1 * y2, atol=1e-12)

    def test_letters_checked(self):
        batch = sample_batch(0.6, Grid(1.0, 4), 1, 2, seed=1)
        with pytest.raises(InputError):
            iterated_integral(batch.values, (2,), batch.grid.dt)
