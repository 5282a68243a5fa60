"""Outer optimization loop over one-dimensional subspaces.

Each iteration asks a direction oracle for a unit vector, restricts the
problem to the maximal segment through the incumbent along that direction,
and solves the restriction with the (safe) 1-D solver against one shared
global GP model.  The incumbent only moves to the sub-solver's best point
when the model estimates it at least as good, so accepted incumbents never
regress in the model's eyes even under noise.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import BaseEstimator

from .benchmarks import NoiseModel, ObjectiveSpec, init_point, noisy_eval
from .geometry import coordinate_direction, intersect, sample_sphere
from .gp import GaussianProcess
from .kernels import RBF
from .line_solver import LineSolverConfig, solve_line
from .safe_solver import solve_line_safe
from .trace import RegretTrace, TraceRecorder
from .validation import as_vector

__all__ = ["DirectionConfig", "OptimizerState", "choose_direction",
           "descent_direction", "LineBO"]

DIRECTION_KINDS = ("random", "coordinate", "descent")

_ZERO_NORM = 1e-12


@dataclass
class DirectionConfig:
    """Direction-oracle settings.

    ``descent_evals`` defaults to twice the dimension when left unset.
    ``descent_normalize`` controls whether the sampled-gradient step has
    length ``descent_step`` (normalized, the default) or is the literal
    ``descent_step * gradient``.
    """

    kind: str = "random"
    coordinate_policy: str = "cycle"
    descent_step: float = 0.1
    descent_evals: int | None = None
    descent_switch_norm: float = 1e-6
    descent_normalize: bool = True

    def __post_init__(self):
        if self.kind not in DIRECTION_KINDS:
            raise ValueError(f"unknown direction kind {self.kind!r}; choose from {DIRECTION_KINDS}")
        if self.coordinate_policy not in ("cycle", "uniform"):
            raise ValueError(f"coordinate_policy must be 'cycle' or 'uniform', got {self.coordinate_policy!r}")
        if not self.descent_step > 0:
            raise ValueError(f"descent_step must be positive, got {self.descent_step}")
        if self.descent_evals is not None and self.descent_evals < 0:
            raise ValueError(f"descent_evals must be nonnegative, got {self.descent_evals}")
        if self.descent_switch_norm < 0:
            raise ValueError(f"descent_switch_norm must be nonnegative, got {self.descent_switch_norm}")


@dataclass(eq=False)
class OptimizerState:
    """Mutable state threaded through one optimizer run."""

    model_f: GaussianProcess
    model_g: GaussianProcess | None
    incumbent: np.ndarray
    domain: object
    iteration: int = 0
    total_evals: int = 0
    buffer_cap: int = 2000


def descent_direction(state: OptimizerState, oracle, cfg: DirectionConfig,
                      rng: np.random.Generator, beta: float = 2.0,
                      on_step=None, max_evals: int | None = None):
    """Thompson-style gradient probing around the incumbent.

    Repeatedly draws a gradient from the posterior at the incumbent, takes a
    small step against it, evaluates the oracle there, and updates the
    model.  Returns the normalized posterior-mean gradient afterwards, or
    ``None`` when it is too small to trust (the caller substitutes a random
    direction).  The probe evaluations count toward the total budget.

    In safe mode a probe point is evaluated only if the constraint model
    certifies it; otherwise the step retreats to the incumbent itself.
    """
    d = state.incumbent.shape[0]
    m = 2 * d if cfg.descent_evals is None else cfg.descent_evals
    if max_evals is not None:
        m = min(m, max_evals)

    for _ in range(m):
        sampled = state.model_f.sample_gradient(state.incumbent, rng)
        norm = float(np.linalg.norm(sampled))
        if cfg.descent_normalize:
            step = cfg.descent_step * sampled / norm if norm > _ZERO_NORM else np.zeros(d)
        else:
            step = cfg.descent_step * sampled
        x_probe = state.domain.clip(state.incumbent - step)
        if state.model_g is not None:
            mean_g, std_g = state.model_g.predict(x_probe[None, :], return_std=True)
            if mean_g[0] + beta * std_g[0] > 0:
                x_probe = state.incumbent.copy()
        y, s = oracle(x_probe)
        state.model_f.update(x_probe, float(y))
        if state.model_g is not None and s is not None:
            state.model_g.update(x_probe, float(s))
        state.total_evals += 1
        if on_step is not None:
            on_step(x_probe, y, state.incumbent)

    grad = state.model_f.mean_gradient(state.incumbent)
    norm = float(np.linalg.norm(grad))
    if norm < max(cfg.descent_switch_norm, _ZERO_NORM):
        return None
    return grad / norm


def choose_direction(cfg: DirectionConfig, state: OptimizerState,
                     rng: np.random.Generator, oracle=None, beta: float = 2.0,
                     on_step=None, max_evals: int | None = None) -> np.ndarray:
    """Next line direction according to the configured oracle.

    The descent oracle falls back to a random direction when the posterior
    mean gradient at the incumbent is below ``descent_switch_norm`` (before
    spending any probe evaluations) or when its probes end with a
    vanishing gradient.
    """
    d = state.incumbent.shape[0]
    if cfg.kind == "random":
        return sample_sphere(d, rng)
    if cfg.kind == "coordinate":
        if cfg.coordinate_policy == "cycle":
            return coordinate_direction(d, index=state.iteration % d)
        return coordinate_direction(d, rng=rng)
    # descent
    grad_norm = float(np.linalg.norm(state.model_f.mean_gradient(state.incumbent)))
    if grad_norm < max(cfg.descent_switch_norm, _ZERO_NORM):
        return sample_sphere(d, rng)
    direction = descent_direction(state, oracle, cfg, rng, beta=beta,
                                  on_step=on_step, max_evals=max_evals)
    if direction is None:
        return sample_sphere(d, rng)
    return direction


class LineBO(BaseEstimator):
    """Black-box minimizer decomposing the problem into line restrictions.

    Parameters
    ----------
    kernel : Kernel, optional
        Shared covariance function for the objective (and constraint) GPs;
        defaults to ``RBF(1.0, 1.0)``.
    noise_std : float
        Assumed observation noise of the GP likelihood.
    beta : float or callable
        Confidence-width multiplier (or a schedule over the number of
        stored observations).
    epsilon : float
        Target accuracy of each line solve (stopping rule threshold).
    budget : int
        Total number of oracle evaluations; the loop runs lines until it is
        exhausted.
    max_evals_per_line : int
        Evaluation cap per line solve.
    grid_size : int
        Base grid resolution of the 1-D solver.
    direction : str
        Direction oracle: ``random``, ``coordinate``, or ``descent``.
    coordinate_policy : str
        ``cycle`` (deterministic sweep) or ``uniform`` for the coordinate
        oracle.
    descent_step, descent_evals, descent_switch_norm, descent_normalize
        Settings of the descent oracle (see :class:`DirectionConfig`).
    safe : bool
        Solve each line with the safe solver; requires a constrained
        objective and a ``lipschitz`` constant.
    lipschitz : float, optional
        Lipschitz bound on the constraint along any line (safe mode only).
    buffer_cap : int
        Maximum number of stored observations; beyond it, the oldest points
        far from the incumbent are evicted.
    """

    def __init__(self, kernel=None, noise_std=0.2, beta=2.0, epsilon=0.05,
                 budget=400, max_evals_per_line=30, grid_size=200,
                 direction="random", coordinate_policy="cycle",
                 descent_step=0.1, descent_evals=None,
                 descent_switch_norm=1e-6, descent_normalize=True,
                 safe=False, lipschitz=None, buffer_cap=2000):
        self.kernel = kernel
        self.noise_std = noise_std
        self.beta = beta
        self.epsilon = epsilon
        self.budget = budget
        self.max_evals_per_line = max_evals_per_line
        self.grid_size = grid_size
        self.direction = direction
        self.coordinate_policy = coordinate_policy
        self.descent_step = descent_step
        self.descent_evals = descent_evals
        self.descent_switch_norm = descent_switch_norm
        self.descent_normalize = descent_normalize
        self.safe = safe
        self.lipschitz = lipschitz
        self.buffer_cap = buffer_cap

    # ------------------------------------------------------------------
    def minimize(self, objective: ObjectiveSpec, noise: NoiseModel | None = None,
                 init: str = "uniform", level: float | None = None,
                 x0=None, seed: int = 0) -> RegretTrace:
        """Run the optimizer and return the per-evaluation regret trace.

        The starting point is drawn by ``init`` (or given as ``x0``); in
        safe mode it must lie in the true safe set.  Identical seeds and
        settings reproduce the trace bit for bit.
        """
        if self.budget < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget}")
        noise = noise if noise is not None else NoiseModel(0.0)
        if self.safe:
            if objective.constraint is None:
                raise ValueError("safe mode requires a constrained objective")
            if self.lipschitz is None:
                raise ValueError("safe mode requires a lipschitz constant")

        init_ss, alg_ss, noise_ss = np.random.SeedSequence(seed).spawn(3)
        rng = np.random.default_rng(alg_ss)
        noise_rng = np.random.default_rng(noise_ss)

        if x0 is None:
            x0 = init_point(objective, init, np.random.default_rng(init_ss), level=level)
        x0 = as_vector(x0, dim=objective.dim, name="x0")
        if not objective.domain.contains(x0, atol=1e-9):
            raise ValueError("starting point lies outside the domain")

        kernel = self.kernel if self.kernel is not None else RBF()
        model_f = GaussianProcess(kernel=kernel, noise_std=self.noise_std)
        model_g = (GaussianProcess(kernel=kernel, noise_std=self.noise_std)
                   if self.safe else None)
        state = OptimizerState(model_f=model_f, model_g=model_g,
                               incumbent=x0.copy(), domain=objective.domain,
                               buffer_cap=self.buffer_cap)
        dir_cfg = DirectionConfig(
            kind=self.direction, coordinate_policy=self.coordinate_policy,
            descent_step=self.descent_step, descent_evals=self.descent_evals,
            descent_switch_norm=self.descent_switch_norm,
            descent_normalize=self.descent_normalize)
        solver_cfg = LineSolverConfig(
            epsilon=self.epsilon, max_evals_per_line=self.max_evals_per_line,
            grid_size=self.grid_size, beta=self.beta)

        recorder = TraceRecorder(objective, noise)

        def oracle(x):
            return noisy_eval(objective, noise, x, noise_rng)

        def scalar_oracle(x):
            return oracle(x)[0]

        band_failures = 0
        band_checks = 0

        def check_bands(info):
            nonlocal band_failures, band_checks
            band_checks += 1
            g_true = np.asarray(objective.constraint(info.points))
            if np.any((g_true < info.lower_g) | (g_true > info.upper_g)):
                band_failures += 1

        transitions: list[list[float]] = []
        lines_meta: list[dict] = []
        started = time.perf_counter()

        while state.total_evals < self.budget:
            remaining = self.budget - state.total_evals
            beta_now = solver_cfg.resolve_beta(model_f.n_samples_)
            direction = choose_direction(dir_cfg, state, rng, oracle=oracle,
                                         beta=beta_now, on_step=recorder.record,
                                         max_evals=remaining)
            remaining = self.budget - state.total_evals
            if remaining <= 0:
                break
            segment = intersect(objective.domain, state.incumbent, direction)
            line_cfg = replace(solver_cfg,
                               max_evals_per_line=min(self.max_evals_per_line, remaining))
            if self.safe:
                result = solve_line_safe(model_f, model_g, segment, oracle,
                                         line_cfg, self.lipschitz,
                                         on_step=recorder.record,
                                         inspect=check_bands)
            else:
                result = solve_line(model_f, segment, scalar_oracle, line_cfg,
                                    on_step=recorder.record)
            state.total_evals += result.evals_used

            means = model_f.predict(np.vstack([result.best_point, state.incumbent]))
            accepted = bool(means[0] <= means[1])
            if accepted:
                transitions.append([float(means[1]), float(means[0])])
                state.incumbent = np.asarray(result.best_point, dtype=float).copy()
            lines_meta.append({
                "offset": segment.offset.tolist(),
                "direction": segment.direction.tolist(),
                "evals_used": int(result.evals_used),
                "converged": bool(result.converged),
                "accepted": accepted,
                "best_alpha": float(result.best_alpha),
            })
            state.iteration += 1
            self._evict(state, kernel.lengthscale)

        assert recorder.n_records == state.total_evals == self.budget

        metadata = {
            "objective": objective.name,
            "budget": self.budget,
            "seed": seed,
            "start_point": x0.tolist(),
            "start_true_f": float(objective.truth(x0)),
            "final_incumbent": state.incumbent.tolist(),
            "incumbent_transitions": transitions,
            "lines": lines_meta,
            "wall_time_s": time.perf_counter() - started,
        }
        if self.safe:
            metadata["band_checks"] = band_checks
            metadata["band_failures"] = band_failures
            metadata["band_coverage_ok"] = band_failures == 0
        self.state_ = state
        return recorder.finalize(metadata)

    # ------------------------------------------------------------------
    @staticmethod
    def _evict(state: OptimizerState, lengthscale: float) -> None:
        """Enforce the data-buffer cap between line solves.

        Drops the oldest points farther than two lengthscales from the
        incumbent first; observations taken at the incumbent itself are
        always retained.
        """
        n = state.model_f.n_samples_
        if n <= state.buffer_cap:
            return
        X = state.model_f.X_
        dist = np.linalg.norm(X - state.incumbent[None, :], axis=1)
        local = dist <= 2.0 * lengthscale
        at_incumbent = dist <= _ZERO_NORM
        keep = np.ones(n, dtype=bool)
        need = n - state.buffer_cap
        for idx in range(n):
            if need == 0:
                break
            if not local[idx]:
                keep[idx] = False
                need -= 1
        for idx in range(n):
            if need == 0:
                break
            if keep[idx] and not at_incumbent[idx]:
                keep[idx] = False
                need -= 1
        state.model_f.fit(X[keep], state.model_f.y_[keep])
        if state.model_g is not None:
            state.model_g.fit(state.model_g.X_[keep], state.model_g.y_[keep])
