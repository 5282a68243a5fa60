"""SafeOpt specialized to a discretized line segment.

The solver maintains a certified safe set over the grid (monotone by
construction, and on a line always a contiguous index interval around the
seed), the expander set of safe points that could enlarge it, and the set
of plausible minimizers.  Points are selected by uncertainty sampling over
expanders and minimizers, and nothing outside the certified safe set is
ever evaluated.  Safety uses the convention ``g(x) <= threshold`` with
``threshold = 0`` by default.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .exceptions import SafeSetError
from .geometry import LineSegment
from .gp import GaussianProcess
from .line_solver import REFINE_POINTS, DEGENERATE_LENGTH, LineSolverConfig, make_grid

__all__ = [
    "SafeState",
    "SafeLineResult",
    "SafeStepInfo",
    "update_safe_set",
    "expanders",
    "minimizers",
    "select",
    "solve_line_safe",
]


@dataclass(eq=False)
class SafeState:
    """Discretized line with safe / expander / minimizer masks.

    ``grid`` holds the scalar line coordinates; all masks are parallel to
    it.  ``lipschitz`` bounds the variation of the constraint along the
    line (the direction is unit norm, so grid distance equals Euclidean
    distance).
    """

    segment: LineSegment
    grid: np.ndarray
    safe_mask: np.ndarray
    expander_mask: np.ndarray
    minimizer_mask: np.ndarray
    lipschitz: float
    threshold: float = 0.0

    @classmethod
    def initial(cls, segment: LineSegment, grid: np.ndarray, seed_alpha: float,
                lipschitz: float, threshold: float = 0.0) -> "SafeState":
        """State whose safe set contains exactly the seed grid point."""
        safe = np.zeros(grid.shape[0], dtype=bool)
        idx = int(np.searchsorted(grid, seed_alpha))
        if idx >= grid.shape[0] or grid[idx] != seed_alpha:
            raise ValueError(f"seed alpha {seed_alpha!r} is not a grid point")
        safe[idx] = True
        empty = np.zeros_like(safe)
        return cls(segment=segment, grid=grid, safe_mask=safe,
                   expander_mask=empty.copy(), minimizer_mask=empty.copy(),
                   lipschitz=lipschitz, threshold=threshold)


@dataclass
class SafeLineResult:
    """Outcome of one safe line solve.

    ``violations`` counts evaluations whose true constraint value was
    positive; it is computed from ground truth by the harness, never by the
    solver (which only sees noisy constraint observations).
    """

    best_point: np.ndarray
    best_alpha: float
    evals_used: int
    err_at_best: float
    converged: bool
    grid: np.ndarray
    safe_mask: np.ndarray
    violations: int = 0


@dataclass
class SafeStepInfo:
    """Per-iteration snapshot passed to the ``inspect`` callback."""

    iteration: int
    alphas: np.ndarray
    points: np.ndarray
    safe_mask: np.ndarray
    lower_g: np.ndarray
    upper_g: np.ndarray
    selected_alpha: float


# ----------------------------------------------------------------------
# mask computations (pure, on precomputed confidence bounds)
# ----------------------------------------------------------------------

def _expand_mask(safe, upper_g, alphas, lipschitz, threshold):
    """One-step Lipschitz enlargement of the safe set (monotone union)."""
    if not safe.any():
        raise SafeSetError("safe set is empty; safety certificate lost")
    dist = np.abs(alphas[None, :] - alphas[safe, None])
    certified = (upper_g[safe, None] + lipschitz * dist <= threshold).any(axis=0)
    return safe | certified


def _expander_counts(safe, lower_g, alphas, lipschitz, threshold):
    """For each safe point, how many unsafe points its optimistic value certifies."""
    counts = np.zeros(alphas.shape[0], dtype=int)
    if not safe.any() or safe.all():
        return counts
    dist = np.abs(alphas[~safe][None, :] - alphas[safe][:, None])
    reach = (lower_g[safe][:, None] + lipschitz * dist <= threshold).sum(axis=1)
    counts[np.flatnonzero(safe)] = reach
    return counts


def _expander_mask(safe, lower_g, alphas, lipschitz, threshold):
    return _expander_counts(safe, lower_g, alphas, lipschitz, threshold) > 0


def _minimizer_mask(safe, lower_f, upper_f):
    """Safe points whose lower bound does not exceed the best safe upper bound."""
    mask = np.zeros(safe.shape[0], dtype=bool)
    if not safe.any():
        return mask
    mask[safe] = lower_f[safe] <= upper_f[safe].min()
    return mask


def _certified_proposals(proposals, safe_alphas, upper_g_safe, lipschitz, threshold):
    dist = np.abs(proposals[None, :] - safe_alphas[:, None])
    return (upper_g_safe[:, None] + lipschitz * dist <= threshold).any(axis=0)


# ----------------------------------------------------------------------
# public set operations
# ----------------------------------------------------------------------

def update_safe_set(state: SafeState, gp_g: GaussianProcess, beta: float) -> SafeState:
    """Enlarge the safe set using pessimistic constraint bounds.

    A point becomes safe when some already-safe point certifies it:
    ``upper_g(safe) + L * distance <= threshold``.  The result is a
    superset of the previous safe set.  Raises :class:`SafeSetError` when
    no point is currently safe.
    """
    points = state.segment.embed_many(state.grid)
    mean, std = gp_g.predict(points, return_std=True)
    new_safe = _expand_mask(state.safe_mask, mean + beta * std, state.grid,
                            state.lipschitz, state.threshold)
    return replace(state, safe_mask=new_safe)


def expanders(state: SafeState, gp_g: GaussianProcess, beta: float) -> np.ndarray:
    """Safe points whose optimistic constraint value would certify an unsafe point."""
    points = state.segment.embed_many(state.grid)
    mean, std = gp_g.predict(points, return_std=True)
    return _expander_mask(state.safe_mask, mean - beta * std, state.grid,
                          state.lipschitz, state.threshold)


def minimizers(state: SafeState, gp_f: GaussianProcess, beta: float) -> np.ndarray:
    """Plausible minimizers: safe points not dominated by the best safe upper bound."""
    points = state.segment.embed_many(state.grid)
    mean, std = gp_f.predict(points, return_std=True)
    return _minimizer_mask(state.safe_mask, mean - beta * std, mean + beta * std)


def select(state: SafeState, gp_f: GaussianProcess, gp_g: GaussianProcess,
           beta: float) -> float:
    """Uncertainty sampling over expanders and minimizers.

    Returns the grid alpha maximizing ``w = max(2 beta std_f, 2 beta std_g)``
    among the stored expander/minimizer masks; ties go to the lowest grid
    index.
    """
    candidates = state.expander_mask | state.minimizer_mask
    if not candidates.any():
        raise ValueError("no expander or minimizer candidates to select from")
    points = state.segment.embed_many(state.grid)
    _, std_f = gp_f.predict(points, return_std=True)
    _, std_g = gp_g.predict(points, return_std=True)
    w = 2.0 * beta * np.maximum(std_f, std_g)
    return float(state.grid[int(np.argmax(np.where(candidates, w, -np.inf)))])


# ----------------------------------------------------------------------
# line solve
# ----------------------------------------------------------------------

def solve_line_safe(gp_f: GaussianProcess, gp_g: GaussianProcess,
                    segment: LineSegment, oracle, config: LineSolverConfig,
                    lipschitz: float, threshold: float = 0.0,
                    on_step=None, inspect=None) -> SafeLineResult:
    """Safe Bayesian optimization restricted to the segment.

    The seed (scalar coordinate 0, i.e. the segment offset) is taken safe:
    it is the previous iterate, whose safety was established before.  The
    oracle maps a point to a noisy pair ``(y, s)`` of objective and
    constraint observations; both posteriors are updated in place after
    every evaluation.  Stops when the err bound over the safe set drops to
    ``epsilon``, when the selected point's uncertainty ``w`` does (the safe
    set is fully explored), or on budget exhaustion.

    ``inspect``, if given, receives a :class:`SafeStepInfo` snapshot of the
    confidence bounds and masks right before each evaluation.
    """
    if lipschitz <= 0:
        raise ValueError(f"lipschitz must be positive, got {lipschitz}")
    grid = make_grid(segment, config.grid_size)
    seed_idx = int(np.searchsorted(grid, 0.0))
    safe = np.zeros(grid.shape[0], dtype=bool)
    safe[seed_idx] = True
    spacing = max(segment.length, DEGENERATE_LENGTH) / (config.grid_size - 1)

    best_alpha = 0.0
    best_point = segment.embed(0.0)
    err_best = np.inf
    last_best = None
    converged = False
    evals = 0

    for iteration in range(config.max_evals_per_line):
        beta = config.resolve_beta(gp_f.n_samples_)
        points = segment.embed_many(grid)
        mean_g, std_g = gp_g.predict(points, return_std=True)
        upper_g = mean_g + beta * std_g
        lower_g = mean_g - beta * std_g

        if not safe.any():  # pragma: no cover - seed keeps the set nonempty
            break
        safe = _expand_mask(safe, upper_g, grid, lipschitz, threshold)

        # Certified refinement near the current best point.  Proposals are
        # restricted to the present safe interval and inserted only when an
        # existing safe point's pessimistic bound certifies them, so the
        # solver never acquires resolution on uncertified ground.
        if last_best is not None and spacing > DEGENERATE_LENGTH:
            safe_alphas = grid[safe]
            lo = max(safe_alphas.min(), last_best - spacing)
            hi = min(safe_alphas.max(), last_best + spacing)
            if hi > lo:
                proposals = np.linspace(lo, hi, REFINE_POINTS)
                proposals = proposals[~np.isin(proposals, grid)]
                if proposals.size:
                    ok = _certified_proposals(proposals, safe_alphas,
                                              upper_g[safe], lipschitz, threshold)
                    new_alphas = proposals[ok]
                    if new_alphas.size:
                        pos = np.searchsorted(grid, new_alphas)
                        new_points = segment.embed_many(new_alphas)
                        mg, sg = gp_g.predict(new_points, return_std=True)
                        grid = np.insert(grid, pos, new_alphas)
                        safe = np.insert(safe, pos, True)
                        points = np.insert(points, pos, new_points, axis=0)
                        mean_g = np.insert(mean_g, pos, mg)
                        std_g = np.insert(std_g, pos, sg)
                        upper_g = mean_g + beta * std_g
                        lower_g = mean_g - beta * std_g

        mean_f, std_f = gp_f.predict(points, return_std=True)
        upper_f = mean_f + beta * std_f
        lower_f = mean_f - beta * std_f

        expander = _expander_mask(safe, lower_g, grid, lipschitz, threshold)
        minimizer = _minimizer_mask(safe, lower_f, upper_f)
        candidates = expander | minimizer
        if not candidates.any():  # pragma: no cover - minimizers are nonempty
            break
        w = 2.0 * beta * np.maximum(std_f, std_g)
        pick = int(np.argmax(np.where(candidates, w, -np.inf)))

        if inspect is not None:
            inspect(SafeStepInfo(iteration=iteration, alphas=grid.copy(),
                                 points=points, safe_mask=safe.copy(),
                                 lower_g=lower_g, upper_g=upper_g,
                                 selected_alpha=float(grid[pick])))

        x_t = points[pick]
        y_t, s_t = oracle(x_t)
        gp_f.update(x_t, float(y_t))
        gp_g.update(x_t, float(s_t))
        evals += 1

        mean2, std2 = gp_f.predict(points[safe], return_std=True)
        errs = (mean2 + beta * std2) - np.min(mean2 - beta * std2)
        best = int(np.argmin(errs))
        best_alpha = float(grid[safe][best])
        best_point = points[safe][best]
        err_best = float(errs[best])
        last_best = best_alpha

        if on_step is not None:
            on_step(x_t, y_t, best_point)
        if err_best <= config.epsilon or w[pick] <= config.epsilon:
            converged = True
            break

    return SafeLineResult(best_point=best_point, best_alpha=best_alpha,
                          evals_used=evals, err_at_best=err_best,
                          converged=converged, grid=grid, safe_mask=safe)
