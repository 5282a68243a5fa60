"""Safe 1-D solver: set computations, selection, and the no-violation contract."""

import numpy as np
import pytest

from linebo.exceptions import SafeSetError
from linebo.geometry import BoxDomain, intersect
from linebo.gp import GaussianProcess
from linebo.kernels import RBF
from linebo.line_solver import LineSolverConfig, make_grid
from linebo.safe_solver import (
    SafeState,
    _expander_mask,
    _minimizer_mask,
    expanders,
    minimizers,
    select,
    solve_line_safe,
    update_safe_set,
)

INTERVAL = BoxDomain([-2.0], [2.0])


def line_through(offset=0.0):
    return intersect(INTERVAL, [offset], [1.0])


def initial_state(grid_size=41, lipschitz=1.0, offset=0.0):
    segment = line_through(offset)
    grid = make_grid(segment, grid_size)
    return SafeState.initial(segment, grid, seed_alpha=0.0, lipschitz=lipschitz)


def brute_force_expansion(safe, upper_g, alphas, lipschitz):
    out = safe.copy()
    for j in range(len(alphas)):
        for i in np.flatnonzero(safe):
            if upper_g[i] + lipschitz * abs(alphas[i] - alphas[j]) <= 0:
                out[j] = True
                break
    return out


def brute_force_expanders(safe, lower_g, alphas, lipschitz):
    mask = np.zeros(len(alphas), dtype=bool)
    for i in np.flatnonzero(safe):
        count = 0
        for j in np.flatnonzero(~safe):
            if lower_g[i] + lipschitz * abs(alphas[i] - alphas[j]) <= 0:
                count += 1
        mask[i] = count > 0
    return mask


class TestUpdateSafeSet:
    def test_prior_uncertainty_blocks_expansion(self):
        state = initial_state()
        gp_g = GaussianProcess(kernel=RBF(0.5, 1.0), noise_std=0.1)
        updated = update_safe_set(state, gp_g, beta=2.0)
        np.testing.assert_array_equal(updated.safe_mask, state.safe_mask)
        assert updated.safe_mask.sum() == 1

    def test_known_constraint_expands_to_lipschitz_reach(self):
        # g = -1 observed with negligible noise near the seed: one update
        # certifies (almost exactly) the unit-radius Lipschitz ball.
        state = initial_state(grid_size=41, lipschitz=1.0)
        gp_g = GaussianProcess(kernel=RBF(0.5, 1.0), noise_std=1e-6)
        obs = np.linspace(-0.2, 0.2, 9)[:, None]
        gp_g.fit(obs, -np.ones(9))
        updated = update_safe_set(state, gp_g, beta=2.0)
        alphas = updated.grid
        assert updated.safe_mask.sum() > 1
        assert np.all(updated.safe_mask[np.abs(alphas) <= 0.95])
        assert not np.any(updated.safe_mask[np.abs(alphas) >= 1.15])

    def test_matches_brute_force(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            state = initial_state(grid_size=31, lipschitz=rng.uniform(0.5, 3.0))
            state.safe_mask[:] = False
            lo, hi = sorted(rng.integers(0, 31, size=2).tolist())
            state.safe_mask[lo:hi + 1] = True
            gp_g = GaussianProcess(kernel=RBF(0.4, 1.0), noise_std=0.1)
            gp_g.fit(rng.uniform(-2, 2, (6, 1)), rng.standard_normal(6))
            updated = update_safe_set(state, gp_g, beta=2.0)
            points = state.segment.embed_many(state.grid)
            mean, std = gp_g.predict(points, return_std=True)
            expected = brute_force_expansion(state.safe_mask, mean + 2.0 * std,
                                             state.grid, state.lipschitz)
            np.testing.assert_array_equal(updated.safe_mask, expected)

    def test_monotone_growth(self):
        rng = np.random.default_rng(1)
        state = initial_state()
        gp_g = GaussianProcess(kernel=RBF(0.5, 1.0), noise_std=0.05)
        for step in range(6):
            gp_g.update(rng.uniform(-1, 1, 1), -1.0 + 0.05 * rng.standard_normal())
            updated = update_safe_set(state, gp_g, beta=2.0)
            assert np.all(updated.safe_mask >= state.safe_mask)
            state = updated

    def test_empty_safe_set_raises(self):
        state = initial_state()
        state.safe_mask[:] = False
        gp_g = GaussianProcess(kernel=RBF(0.5, 1.0), noise_std=0.1)
        with pytest.raises(SafeSetError):
            update_safe_set(state, gp_g, beta=2.0)


class TestExpanders:
    def test_everything_safe_means_no_expanders(self):
        state = initial_state()
        state.safe_mask[:] = True
        gp_g = GaussianProcess(kernel=RBF(0.5, 1.0), noise_std=0.1)
        assert not expanders(state, gp_g, beta=2.0).any()

    def test_constant_bound_expanders_hug_the_endpoints(self):
        # With a constant optimistic bound every safe point has the same
        # reach, so exactly the points within reach of the interval ends
        # can certify something unsafe.
        alphas = np.linspace(-2, 2, 41)
        safe = (np.abs(alphas) <= 1.0 + 1e-12)
        lower_g = np.full(41, -0.25)
        mask = _expander_mask(safe, lower_g, alphas, lipschitz=1.0, threshold=0.0)
        # reach is 0.25; nearest unsafe points sit at +-1.1
        expected = safe & (np.minimum(np.abs(alphas - 1.1), np.abs(alphas + 1.1)) <= 0.25)
        np.testing.assert_array_equal(mask, expected)
        assert mask.any()

    def test_degenerate_width_equals_true_cone(self):
        # sigma ~ 0 surrogate: optimistic == pessimistic == posterior mean.
        state = initial_state(grid_size=31, lipschitz=2.0)
        state.safe_mask[10:20] = True
        gp_g = GaussianProcess(kernel=RBF(0.6, 1.0), noise_std=1e-6)
        obs = np.linspace(-1.5, 1.5, 25)[:, None]
        gp_g.fit(obs, np.sin(obs[:, 0]) - 0.8)
        mask = expanders(state, gp_g, beta=0.0)
        points = state.segment.embed_many(state.grid)
        mean = gp_g.predict(points)
        expected = brute_force_expanders(state.safe_mask, mean, state.grid, 2.0)
        np.testing.assert_array_equal(mask, expected)

    def test_matches_brute_force_random(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            state = initial_state(grid_size=31, lipschitz=rng.uniform(0.5, 2.0))
            state.safe_mask[:] = rng.random(31) < 0.4
            state.safe_mask[15] = True
            gp_g = GaussianProcess(kernel=RBF(0.4, 1.0), noise_std=0.1)
            gp_g.fit(rng.uniform(-2, 2, (5, 1)), rng.standard_normal(5))
            mask = expanders(state, gp_g, beta=2.0)
            points = state.segment.embed_many(state.grid)
            mean, std = gp_g.predict(points, return_std=True)
            expected = brute_force_expanders(state.safe_mask, mean - 2.0 * std,
                                             state.grid, state.lipschitz)
            np.testing.assert_array_equal(mask, expected)


class TestMinimizers:
    def test_prior_keeps_all_safe_points(self):
        state = initial_state()
        state.safe_mask[5:30] = True
        gp_f = GaussianProcess(kernel=RBF(0.5, 1.0), noise_std=0.1)
        mask = minimizers(state, gp_f, beta=2.0)
        np.testing.assert_array_equal(mask, state.safe_mask)

    def test_separated_intervals_leave_one_point(self):
        alphas = np.linspace(-1, 1, 11)
        safe = np.ones(11, dtype=bool)
        lower = np.full(11, 10.0)
        upper = np.full(11, 12.0)
        lower[4], upper[4] = -5.0, -4.0  # far below everything else
        mask = _minimizer_mask(safe, lower, upper)
        assert mask[4] and mask.sum() == 1

    def test_nonempty_whenever_safe_nonempty(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            n = 21
            safe = rng.random(n) < 0.5
            if not safe.any():
                safe[int(rng.integers(n))] = True
            lower = rng.standard_normal(n)
            upper = lower + rng.uniform(0.1, 2.0, n)
            assert _minimizer_mask(safe, lower, upper).any()


class TestSelect:
    def test_definitional_replay(self):
        rng = np.random.default_rng(4)
        state = initial_state(grid_size=31)
        gp_f = GaussianProcess(kernel=RBF(0.5, 1.0), noise_std=0.1)
        gp_g = GaussianProcess(kernel=RBF(0.5, 1.0), noise_std=0.1)
        gp_f.fit(rng.uniform(-2, 2, (5, 1)), rng.standard_normal(5))
        gp_g.fit(rng.uniform(-2, 2, (5, 1)), rng.standard_normal(5) - 1.0)
        state.safe_mask[10:25] = True
        state = update_safe_set(state, gp_g, beta=2.0)
        state.expander_mask = expanders(state, gp_g, beta=2.0)
        state.minimizer_mask = minimizers(state, gp_f, beta=2.0)
        alpha = select(state, gp_f, gp_g, beta=2.0)

        points = state.segment.embed_many(state.grid)
        _, std_f = gp_f.predict(points, return_std=True)
        _, std_g = gp_g.predict(points, return_std=True)
        w = 2.0 * 2.0 * np.maximum(std_f, std_g)
        candidates = state.expander_mask | state.minimizer_mask
        chosen = int(np.flatnonzero(state.grid == alpha)[0])
        assert candidates[chosen]
        assert w[chosen] == pytest.approx(w[candidates].max(), abs=1e-14)

    def test_single_candidate_is_returned(self):
        state = initial_state()
        state.minimizer_mask = state.safe_mask.copy()  # just the seed
        gp = GaussianProcess(kernel=RBF(0.5, 1.0), noise_std=0.1)
        assert select(state, gp, gp, beta=2.0) == 0.0

    def test_empty_candidates_raise(self):
        state = initial_state()
        gp = GaussianProcess(kernel=RBF(0.5, 1.0), noise_std=0.1)
        with pytest.raises(ValueError):
            select(state, gp, gp, beta=2.0)


class TestSolveLineSafe:
    @staticmethod
    def run_fixture(seed, g_fn, noise=1e-3, beta=3.0, lipschitz=1.5, budget=40,
                    offset=0.0, inspect=None):
        domain = BoxDomain([-1.0], [1.0])
        segment = intersect(domain, [offset], [1.0])
        gp_f = GaussianProcess(kernel=RBF(0.3, 1.0), noise_std=max(noise, 1e-3))
        gp_g = GaussianProcess(kernel=RBF(0.3, 1.0), noise_std=max(noise, 1e-3))
        rng = np.random.default_rng(seed)
        evaluated = []

        def oracle(x):
            evaluated.append(float(x[0]))
            return (float(x[0] ** 2) + noise * rng.standard_normal(),
                    g_fn(float(x[0])) + noise * rng.standard_normal())

        config = LineSolverConfig(epsilon=0.05, max_evals_per_line=budget, beta=beta)
        result = solve_line_safe(gp_f, gp_g, segment, oracle, config,
                                 lipschitz=lipschitz, inspect=inspect)
        return result, np.array(evaluated)

    def test_non_binding_constraint_recovers_minimum(self):
        hits = 0
        for seed in range(100):
            result, _ = self.run_fixture(seed, g_fn=lambda a: -10.0,
                                         lipschitz=2.0, budget=50)
            if abs(result.best_point[0]) <= 0.1:
                hits += 1
        assert hits >= 90

    def test_binding_constraint_never_violated(self):
        # true safe region is a <= 0.5
        total_violations = 0
        for seed in range(100):
            _, evaluated = self.run_fixture(seed, g_fn=lambda a: a - 0.5)
            total_violations += int((evaluated - 0.5 > 0).sum())
        assert total_violations == 0

    def test_seed_only_when_nothing_certifiable(self):
        # Huge observation noise keeps every pessimistic bound positive, so
        # the solver never leaves the (assumed safe) seed.
        result, evaluated = self.run_fixture(0, g_fn=lambda a: -0.01,
                                             noise=0.5, lipschitz=10.0, budget=15)
        assert result.evals_used == 15
        np.testing.assert_allclose(evaluated, 0.0, atol=1e-12)
        assert result.safe_mask.sum() == 1

    def test_invariants_via_inspection(self):
        snapshots = []
        result, _ = self.run_fixture(7, g_fn=lambda a: a - 0.5,
                                     inspect=snapshots.append)
        assert snapshots
        previous_safe = None
        for info in snapshots:
            safe_idx = np.flatnonzero(info.safe_mask)
            # contiguity: the safe set is one index interval containing the seed
            assert np.all(np.diff(safe_idx) == 1)
            assert info.alphas[safe_idx].min() <= 0.0 <= info.alphas[safe_idx].max()
            # selection happens inside the certified safe set
            assert info.selected_alpha in set(info.alphas[info.safe_mask])
            # monotonicity on alpha values (the grid may gain points)
            safe_alphas = set(info.alphas[info.safe_mask])
            if previous_safe is not None:
                assert previous_safe <= safe_alphas
            previous_safe = safe_alphas
        # the reported best point is a certified safe point
        assert float(result.best_alpha) in set(result.grid[result.safe_mask])

    def test_budget_and_result_consistency(self):
        result, evaluated = self.run_fixture(3, g_fn=lambda a: a - 0.5, budget=25)
        assert result.evals_used <= 25
        assert result.evals_used == len(evaluated)
        np.testing.assert_allclose(result.best_point,
                                   result.best_point.clip(-1, 1))

    def test_invalid_lipschitz_rejected(self):
        domain = BoxDomain([-1.0], [1.0])
        segment = intersect(domain, [0.0], [1.0])
        gp = GaussianProcess(kernel=RBF(0.3, 1.0), noise_std=0.1)
        with pytest.raises(ValueError):
            solve_line_safe(gp, gp, segment, lambda x: (0.0, -1.0),
                            LineSolverConfig(), lipschitz=0.0)
