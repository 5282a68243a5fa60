"""1-D solver: acquisition, stopping rule, and candidate quality."""

import numpy as np
import pytest

from linebo.geometry import BoxDomain, intersect
from linebo.gp import GaussianProcess
from linebo.kernels import RBF
from linebo.line_solver import LineSolverConfig, err, make_grid, refine_grid, solve_line, ucb

INTERVAL = BoxDomain([-1.0], [1.0])


def fresh_gp(noise=1e-3, lengthscale=0.3, variance=1.0):
    return GaussianProcess(kernel=RBF(lengthscale, variance), noise_std=noise)


def segment_at(offset=0.0):
    return intersect(INTERVAL, [offset], [1.0])


class TestAcquisition:
    def test_ucb_on_prior(self):
        gp = fresh_gp(variance=1.0)
        values = ucb(gp, np.linspace(-1, 1, 7)[:, None], beta=2.0)
        np.testing.assert_allclose(values, -2.0, atol=1e-12)

    def test_ucb_is_mean_minus_beta_std(self):
        rng = np.random.default_rng(0)
        gp = fresh_gp(noise=0.1).fit(rng.uniform(-1, 1, (8, 1)), rng.standard_normal(8))
        X = rng.uniform(-1, 1, (20, 1))
        mean, std = gp.predict(X, return_std=True)
        np.testing.assert_allclose(ucb(gp, X, 1.7), mean - 1.7 * std, atol=1e-14)

    def test_grid_argmin_matches_brute_force(self):
        rng = np.random.default_rng(1)
        gp = fresh_gp(noise=0.1).fit(rng.uniform(-1, 1, (6, 1)), rng.standard_normal(6))
        X = np.linspace(-1, 1, 101)[:, None]
        values = ucb(gp, X, 2.0)
        mean, std = gp.predict(X, return_std=True)
        assert np.argmin(values) == np.argmin(mean - 2.0 * std)


class TestErr:
    def test_prior_width(self):
        variance = 2.25
        gp = fresh_gp(variance=variance)
        x = np.array([0.3])
        expected = 2.0 * 2.0 * np.sqrt(variance)
        assert err(gp, x, x[None, :], beta=2.0) == pytest.approx(expected, abs=1e-12)

    def test_nonnegative_when_x_is_candidate(self):
        rng = np.random.default_rng(2)
        gp = fresh_gp(noise=0.1).fit(rng.uniform(-1, 1, (10, 1)), rng.standard_normal(10))
        candidates = rng.uniform(-1, 1, (15, 1))
        for x in candidates:
            assert err(gp, x, candidates, beta=2.0) >= 0.0

    def test_err_contracts_on_smooth_function(self):
        # On f(a) = a^2 with tiny noise, 200 evaluations shrink the best
        # err bound to well under a fifth of its prior value.
        gp = fresh_gp(noise=0.01)
        rng = np.random.default_rng(3)
        config = LineSolverConfig(epsilon=1e-6, max_evals_per_line=200, beta=2.0)
        err_start = 2.0 * 2.0 * 1.0  # prior width, all grid points identical
        result = solve_line(gp, segment_at(0.0),
                            lambda x: float(x[0] ** 2) + 0.01 * rng.standard_normal(),
                            config)
        assert result.err_at_best <= err_start / 5.0


class TestMakeGrid:
    def test_exact_uniform_grid(self):
        seg = intersect(BoxDomain([0.0], [2.0]), [0.0], [1.0])
        assert seg.alpha_lo == 0.0 and seg.alpha_hi == 2.0
        # rescale to [0, 1] by using half the segment
        seg_unit = intersect(BoxDomain([0.0], [1.0]), [0.0], [1.0])
        np.testing.assert_array_equal(make_grid(seg_unit, 5), [0.0, 0.25, 0.5, 0.75, 1.0])

    def test_endpoints_and_offset_included(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            seg = segment_at(rng.uniform(-0.9, 0.9))
            grid = make_grid(seg, 37)
            assert grid[0] == seg.alpha_lo and grid[-1] == seg.alpha_hi
            assert 0.0 in grid

    def test_refinement_stays_in_range(self):
        seg = segment_at(0.0)
        grid = make_grid(seg, 11)
        spacing = seg.length / 10
        refined = refine_grid(grid, seg.alpha_hi, spacing, seg.alpha_lo, seg.alpha_hi)
        assert refined.min() >= seg.alpha_lo and refined.max() <= seg.alpha_hi
        assert refined.size > grid.size


class TestSolveLine:
    def test_quadratic_candidate_quality(self):
        hits = 0
        for seed in range(100):
            rng = np.random.default_rng(seed)
            seg = segment_at(rng.uniform(-0.8, 0.8))
            gp = fresh_gp(noise=1e-3)
            result = solve_line(gp, seg, lambda x: float(x[0] ** 2),
                                LineSolverConfig(epsilon=0.05, max_evals_per_line=50))
            if abs(result.best_point[0]) <= 0.1:
                hits += 1
        assert hits >= 95

    def test_budget_of_one(self):
        calls = []

        def oracle(x):
            calls.append(x.copy())
            return float(x[0] ** 2)

        result = solve_line(fresh_gp(), segment_at(0.2), oracle,
                            LineSolverConfig(max_evals_per_line=1))
        assert result.evals_used == 1 and len(calls) == 1
        assert not result.converged  # a single step cannot certify epsilon

    def test_budget_respected(self):
        rng = np.random.default_rng(5)
        for budget in (1, 3, 17):
            gp = fresh_gp(noise=0.1)
            result = solve_line(gp, segment_at(0.0),
                                lambda x: float(np.sin(3 * x[0])) + 0.1 * rng.standard_normal(),
                                LineSolverConfig(max_evals_per_line=budget))
            assert result.evals_used <= budget

    def test_posterior_std_shrinks(self):
        gp = fresh_gp(noise=0.05)
        seg = segment_at(0.1)
        probe = seg.embed_many(np.linspace(seg.alpha_lo, seg.alpha_hi, 50))
        _, std_before = gp.predict(probe, return_std=True)
        rng = np.random.default_rng(6)
        solve_line(gp, seg, lambda x: float(x[0] ** 2) + 0.05 * rng.standard_normal(),
                   LineSolverConfig(max_evals_per_line=10))
        _, std_after = gp.predict(probe, return_std=True)
        assert np.all(std_after <= std_before + 1e-10)

    def test_stopping_soundness_replay(self):
        gp = fresh_gp(noise=1e-3)
        config = LineSolverConfig(epsilon=0.05, max_evals_per_line=50, beta=2.0)
        seg = segment_at(0.0)
        result = solve_line(gp, seg, lambda x: float(x[0] ** 2), config)
        assert result.converged
        assert result.err_at_best <= config.epsilon
        replayed = err(gp, result.best_point, seg.embed_many(result.grid), 2.0)
        assert replayed == pytest.approx(result.err_at_best, abs=1e-12)
        np.testing.assert_allclose(result.best_point, seg.embed(result.best_alpha))

    def test_shared_model_accumulates_data(self):
        gp = fresh_gp(noise=0.1)
        rng = np.random.default_rng(7)
        oracle = lambda x: float(x[0] ** 2) + 0.1 * rng.standard_normal()  # noqa: E731
        total = 0
        for offset in (0.5, -0.3):
            result = solve_line(gp, segment_at(offset), oracle,
                                LineSolverConfig(max_evals_per_line=8))
            total += result.evals_used
        assert gp.n_samples_ == total

    def test_on_step_called_per_evaluation(self):
        steps = []
        gp = fresh_gp(noise=0.1)
        rng = np.random.default_rng(8)
        solve_line(gp, segment_at(0.0),
                   lambda x: float(x[0] ** 2) + 0.1 * rng.standard_normal(),
                   LineSolverConfig(max_evals_per_line=6),
                   on_step=lambda x, y, best: steps.append((x.copy(), y, best.copy())))
        assert len(steps) == 6

    def test_degenerate_segment_single_evaluation(self):
        # At the corner (1, 1) the direction (1, -1) leaves the box both
        # forward and backward, so the segment collapses to the offset.
        corner = intersect(BoxDomain([-1.0, -1.0], [1.0, 1.0]), [1.0, 1.0], [1.0, -1.0])
        assert corner.length == pytest.approx(0.0, abs=1e-12)
        calls = []

        def oracle(x):
            calls.append(x.copy())
            return 0.0

        result = solve_line(fresh_gp(), corner, oracle, LineSolverConfig())
        assert result.evals_used == 1 and len(calls) == 1
        np.testing.assert_allclose(result.best_point, [1.0, 1.0])


def test_config_validation():
    with pytest.raises(ValueError):
        LineSolverConfig(epsilon=0.0)
    with pytest.raises(ValueError):
        LineSolverConfig(grid_size=1)
    with pytest.raises(ValueError):
        LineSolverConfig(max_evals_per_line=0)
