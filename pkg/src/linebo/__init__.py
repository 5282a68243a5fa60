"""Bayesian optimization over one-dimensional subspaces, with a safe variant.

High-dimensional black-box minimization is decomposed into a sequence of
1-D Bayesian optimization sub-problems along lines through the incumbent,
against one shared Gaussian-process model.  Each line can instead be solved
with a SafeOpt-style solver that never evaluates outside a certified safe
set of a constraint.  A benchmark harness with synthetic objectives,
seeded noise, and regret traces reproduces the method's evaluation
protocol end to end.
"""

from .benchmarks import (
    BENCHMARKS,
    NoiseModel,
    ObjectiveSpec,
    augment,
    camelback,
    constrain,
    gaussian_nd,
    hartmann6,
    init_point,
    make_objective,
    noisy_eval,
)
from .exceptions import ConfigError, FactorizationError, SafeSetError
from .geometry import BoxDomain, LineSegment, coordinate_direction, intersect, sample_sphere
from .gp import GaussianProcess
from .harness import ExperimentConfig, parse_config, random_search, run_experiment
from .kernels import RBF, Kernel, Matern32, Matern52, make_kernel
from .line_solver import LineResult, LineSolverConfig, err, make_grid, solve_line, ucb
from .optimizer import DirectionConfig, LineBO, OptimizerState, choose_direction, descent_direction
from .safe_solver import (
    SafeLineResult,
    SafeState,
    expanders,
    minimizers,
    select,
    solve_line_safe,
    update_safe_set,
)
from .trace import RegretTrace, TraceRecorder

__version__ = "0.1.0"

__all__ = [
    "BENCHMARKS",
    "BoxDomain",
    "ConfigError",
    "DirectionConfig",
    "ExperimentConfig",
    "FactorizationError",
    "GaussianProcess",
    "Kernel",
    "LineBO",
    "LineResult",
    "LineSegment",
    "LineSolverConfig",
    "Matern32",
    "Matern52",
    "NoiseModel",
    "ObjectiveSpec",
    "OptimizerState",
    "RBF",
    "RegretTrace",
    "SafeLineResult",
    "SafeSetError",
    "SafeState",
    "TraceRecorder",
    "augment",
    "camelback",
    "choose_direction",
    "constrain",
    "coordinate_direction",
    "descent_direction",
    "err",
    "expanders",
    "gaussian_nd",
    "hartmann6",
    "init_point",
    "intersect",
    "make_grid",
    "make_kernel",
    "make_objective",
    "minimizers",
    "noisy_eval",
    "parse_config",
    "random_search",
    "run_experiment",
    "sample_sphere",
    "select",
    "solve_line",
    "solve_line_safe",
    "ucb",
    "update_safe_set",
]
