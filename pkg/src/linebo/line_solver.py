"""One-dimensional Bayesian optimization on a line segment.

The solver runs plain GP-UCB (minimization convention) on an adaptive grid
over the scalar line coordinate, updating a shared global posterior after
every oracle evaluation.  It stops once the certifiable suboptimality bound
``err`` of the best grid point drops below the target accuracy, or when the
per-line evaluation budget is exhausted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import LineSegment
from .gp import GaussianProcess

__all__ = ["LineSolverConfig", "LineResult", "ucb", "err", "make_grid", "solve_line"]

#: Number of points inserted around each acquisition minimum.
REFINE_POINTS = 10

#: Segments shorter than this are treated as a single point.
DEGENERATE_LENGTH = 1e-12


@dataclass
class LineSolverConfig:
    """Knobs of the 1-D solver.

    ``beta`` may be a constant or a callable mapping the current number of
    stored observations to a confidence-width multiplier.
    """

    epsilon: float = 0.05
    max_evals_per_line: int = 30
    grid_size: int = 200
    beta: float | Callable[[int], float] = 2.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.grid_size < 2:
            raise ValueError(f"grid_size must be >= 2, got {self.grid_size}")
        if self.max_evals_per_line < 1:
            raise ValueError(f"max_evals_per_line must be >= 1, got {self.max_evals_per_line}")

    def resolve_beta(self, t: int) -> float:
        return float(self.beta(t)) if callable(self.beta) else float(self.beta)


@dataclass
class LineResult:
    """Outcome of one line solve.

    ``best_point == segment.embed(best_alpha)`` and, whenever ``converged``
    is true, ``err_at_best <= epsilon``.  ``grid`` is the final refined
    alpha grid, kept for replay checks and slice plots.
    """

    best_point: np.ndarray
    best_alpha: float
    evals_used: int
    err_at_best: float
    converged: bool
    grid: np.ndarray


def ucb(gp: GaussianProcess, X, beta: float) -> np.ndarray:
    """Lower confidence bound ``mean - beta * std`` (the acquisition to minimize)."""
    mean, std = gp.predict(X, return_std=True)
    return mean - beta * std


def err(gp: GaussianProcess, x, candidates, beta: float) -> float:
    """Certifiable suboptimality bound of ``x`` against a candidate set.

    Upper confidence value at ``x`` minus the smallest lower confidence
    value over the candidates; nonnegative whenever ``x`` is itself a
    candidate.
    """
    mean_x, std_x = gp.predict(np.atleast_2d(x), return_std=True)
    mean_c, std_c = gp.predict(candidates, return_std=True)
    return float(mean_x[0] + beta * std_x[0] - np.min(mean_c - beta * std_c))


def make_grid(segment: LineSegment, grid_size: int) -> np.ndarray:
    """Uniform alpha grid over the segment, endpoints and the offset included."""
    if grid_size < 2:
        raise ValueError(f"grid_size must be >= 2, got {grid_size}")
    base = np.linspace(segment.alpha_lo, segment.alpha_hi, grid_size)
    return np.union1d(base, [0.0])


def refine_grid(grid: np.ndarray, center: float, spacing: float,
                lo: float, hi: float) -> np.ndarray:
    """Insert extra points spanning one base-grid cell on each side of ``center``."""
    lo_r = max(lo, center - spacing)
    hi_r = min(hi, center + spacing)
    return np.union1d(grid, np.linspace(lo_r, hi_r, REFINE_POINTS))


def solve_line(gp: GaussianProcess, segment: LineSegment, oracle,
               config: LineSolverConfig, on_step=None) -> LineResult:
    """Minimize the oracle on the segment with GP-UCB and the err stopping rule.

    ``gp`` is the shared global model and is updated in place, so data is
    carried over between successive line solves.  ``oracle`` maps a point to
    a noisy observation.  ``on_step(x_eval, y, best_point)``, if given, is
    called once per oracle evaluation with the current best grid point.
    """
    if segment.length < DEGENERATE_LENGTH:
        x = segment.embed(0.0)
        y = float(oracle(x))
        gp.update(x, y)
        beta = config.resolve_beta(gp.n_samples_)
        e = err(gp, x, x[None, :], beta)
        if on_step is not None:
            on_step(x, y, x)
        return LineResult(best_point=x, best_alpha=0.0, evals_used=1,
                          err_at_best=e, converged=e <= config.epsilon,
                          grid=np.array([0.0]))

    grid = make_grid(segment, config.grid_size)
    spacing = segment.length / (config.grid_size - 1)

    best_alpha = 0.0
    best_point = segment.embed(0.0)
    err_best = np.inf
    converged = False
    evals = 0
    for _ in range(config.max_evals_per_line):
        beta = config.resolve_beta(gp.n_samples_)

        # Acquisition on the current grid, then one local refinement pass
        # around its minimizer before committing to an evaluation point.
        coarse = ucb(gp, segment.embed_many(grid), beta)
        grid = refine_grid(grid, grid[int(np.argmin(coarse))], spacing,
                           segment.alpha_lo, segment.alpha_hi)
        points = segment.embed_many(grid)
        acq = ucb(gp, points, beta)
        pick = int(np.argmin(acq))

        x_t = points[pick]
        y_t = float(oracle(x_t))
        gp.update(x_t, y_t)
        evals += 1

        mean, std = gp.predict(points, return_std=True)
        errs = (mean + beta * std) - np.min(mean - beta * std)
        best = int(np.argmin(errs))
        best_alpha = float(grid[best])
        best_point = points[best]
        err_best = float(errs[best])

        if on_step is not None:
            on_step(x_t, y_t, best_point)
        if err_best <= config.epsilon:
            converged = True
            break

    return LineResult(best_point=best_point, best_alpha=best_alpha,
                      evals_used=evals, err_at_best=err_best,
                      converged=converged, grid=grid)
