"""Synthetic benchmark objectives, noise injection, and initialization modes.

All objective functions are vectorized over the leading axis: they accept a
single point of shape ``(d,)`` or a batch ``(n, d)``.  Optima are frozen
constants derived numerically (dense grids plus local refinement for the
camelback, multi-start L-BFGS-B for Hartmann-6).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .geometry import BoxDomain, sample_sphere

__all__ = [
    "ObjectiveSpec",
    "NoiseModel",
    "camelback",
    "hartmann6",
    "gaussian_nd",
    "camelback_spec",
    "hartmann6_spec",
    "gaussian_spec",
    "augment",
    "constrain",
    "noisy_eval",
    "level_set_radius",
    "init_point",
    "make_objective",
    "BENCHMARKS",
]

#: Global minimum of the six-hump camelback on [-2, 2] x [-1, 1]
#: (2001 x 2001 grid search followed by Nelder-Mead refinement).
CAMELBACK_FSTAR = -1.0316284534898774

#: Global minimum of Hartmann-6 on the unit cube
#: (10^4 random L-BFGS-B starts).
HARTMANN6_FSTAR = -3.322368011415513

#: Default constraint threshold for the camelback: with the literal
#: ``g = -f + tau`` convention this keeps roughly 30% of the domain safe.
CAMELBACK_TAU = 2.0

#: Rejection-sampling cap for safe-set initialization.
_REJECTION_CAP = 1_000_000

_HARTMANN6_A = np.array([
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
])
_HARTMANN6_P = 1e-4 * np.array([
    [1312.0, 1696.0, 5569.0, 124.0, 8283.0, 5886.0],
    [2329.0, 4135.0, 8307.0, 3736.0, 1004.0, 9991.0],
    [2348.0, 1451.0, 3522.0, 2883.0, 3047.0, 6650.0],
    [4047.0, 8828.0, 8732.0, 5743.0, 1091.0, 381.0],
])
_HARTMANN6_C = np.array([1.0, 1.2, 3.0, 3.2])


def camelback(x) -> np.ndarray | float:
    """Six-hump camelback on ``[-2, 2] x [-1, 1]``."""
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    value = ((4.0 - 2.1 * x1**2 + x1**4 / 3.0) * x1**2
             + x1 * x2 + (-4.0 + 4.0 * x2**2) * x2**2)
    return value if value.ndim else float(value)


def hartmann6(x) -> np.ndarray | float:
    """Hartmann function in six dimensions on the unit cube."""
    x = np.asarray(x, dtype=float)
    inner = (_HARTMANN6_A * (x[..., None, :] - _HARTMANN6_P) ** 2).sum(axis=-1)
    value = -(_HARTMANN6_C * np.exp(-inner)).sum(axis=-1)
    return value if value.ndim else float(value)


def gaussian_nd(x) -> np.ndarray | float:
    """Inverted Gaussian bump ``-exp(-4 ||x||^2)``; global minimum -1 at the origin."""
    x = np.asarray(x, dtype=float)
    value = -np.exp(-4.0 * (x**2).sum(axis=-1))
    return value if value.ndim else float(value)


@dataclass(frozen=True, eq=False)
class ObjectiveSpec:
    """A benchmark objective with optional constraint and known structure.

    ``truth`` is the noiseless objective (vectorized over rows);
    ``constraint`` (when present) is safe where its value is <= 0.
    ``effective_dim`` counts the coordinates the function actually varies
    in; ``permutation`` records the coordinate shuffle of augmented
    functions.
    """

    name: str
    dim: int
    domain: BoxDomain
    truth: Callable
    f_star: float
    constraint: Callable | None = None
    effective_dim: int | None = None
    permutation: np.ndarray | None = None

    def __post_init__(self):
        if self.effective_dim is None:
            object.__setattr__(self, "effective_dim", self.dim)


@dataclass(frozen=True)
class NoiseModel:
    """Independent additive Gaussian observation noise."""

    std: float = 0.0

    def __post_init__(self):
        if self.std < 0:
            raise ValueError(f"noise std must be nonnegative, got {self.std}")


def camelback_spec() -> ObjectiveSpec:
    domain = BoxDomain(np.array([-2.0, -1.0]), np.array([2.0, 1.0]))
    return ObjectiveSpec(name="camelback", dim=2, domain=domain,
                         truth=camelback, f_star=CAMELBACK_FSTAR)


def hartmann6_spec() -> ObjectiveSpec:
    domain = BoxDomain(np.zeros(6), np.ones(6))
    return ObjectiveSpec(name="hartmann6", dim=6, domain=domain,
                         truth=hartmann6, f_star=HARTMANN6_FSTAR)


def gaussian_spec(dim: int = 10) -> ObjectiveSpec:
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    domain = BoxDomain(-np.ones(dim), np.ones(dim))
    return ObjectiveSpec(name=f"gaussian{dim}d", dim=dim, domain=domain,
                         truth=gaussian_nd, f_star=-1.0)


def augment(base: ObjectiveSpec, extra_dims: int, rng: np.random.Generator) -> ObjectiveSpec:
    """Embed the objective into a higher-dimensional unit box with shuffled axes.

    A seeded random permutation routes the first ``base.dim``
    post-permutation coordinates (affinely rescaled from the unit box to the
    base domain) into the base function; the remaining coordinates are never
    read, so the result is exactly invariant along them and its effective
    dimension and optimum value are those of the base.
    """
    if extra_dims < 0:
        raise ValueError(f"extra_dims must be nonnegative, got {extra_dims}")
    dim = base.dim + extra_dims
    perm = rng.permutation(dim)
    width = base.domain.upper - base.domain.lower
    lower = base.domain.lower

    def routed(z, fn):
        z = np.asarray(z, dtype=float)
        active = z[..., perm[:base.dim]]
        return fn(lower + width * active)

    truth = lambda z: routed(z, base.truth)  # noqa: E731
    constraint = None
    if base.constraint is not None:
        constraint = lambda z: routed(z, base.constraint)  # noqa: E731
    domain = BoxDomain(np.zeros(dim), np.ones(dim))
    return ObjectiveSpec(name=f"{base.name}+{extra_dims}d", dim=dim, domain=domain,
                         truth=truth, f_star=base.f_star, constraint=constraint,
                         effective_dim=base.effective_dim, permutation=perm)


def constrain(base: ObjectiveSpec, tau: float, flip: bool = False) -> ObjectiveSpec:
    """Attach the threshold constraint ``g(x) = -f(x) + tau`` to the objective.

    With the safe convention ``g <= 0`` this makes ``{f >= tau}`` the safe
    region.  ``flip=True`` uses ``g(x) = f(x) - tau`` instead, turning the
    threshold into a ceiling on the objective (safe region ``{f <= tau}``).
    """
    truth = base.truth
    if flip:
        constraint = lambda x: truth(x) - tau  # noqa: E731
    else:
        constraint = lambda x: -truth(x) + tau  # noqa: E731
    return replace(base, name=f"{base.name}-constraint", constraint=constraint)


def noisy_eval(spec: ObjectiveSpec, noise: NoiseModel, x,
               rng: np.random.Generator) -> tuple[float, float | None]:
    """Noisy oracle: ``y = f(x) + eps`` and, if constrained, ``s = g(x) + eps'``.

    The two noise terms are independent draws; with ``std = 0`` the values
    are exact.  Deterministic for a given generator state.
    """
    y = float(spec.truth(x)) + noise.std * float(rng.standard_normal())
    if spec.constraint is None:
        return y, None
    s = float(spec.constraint(x)) + noise.std * float(rng.standard_normal())
    return y, s


def level_set_radius(y0: float) -> float:
    """Radius of the sphere where the Gaussian benchmark equals ``y0``."""
    if not -1.0 < y0 < 0.0:
        raise ValueError(f"level value must lie in (-1, 0), got {y0}")
    return float(np.sqrt(np.log(-1.0 / y0)) / 2.0)


def init_point(spec: ObjectiveSpec, mode: str, rng: np.random.Generator,
               level: float | None = None) -> np.ndarray:
    """Draw a starting point.

    Modes: ``uniform`` (uniform in the box), ``uniform-safe`` (rejection
    sampling against the true constraint, capped at 10^6 attempts), and
    ``levelset`` (Gaussian benchmark only: uniform direction scaled to the
    analytic radius of ``{f = level}``).
    """
    if mode == "uniform":
        return spec.domain.sample_uniform(rng)
    if mode == "uniform-safe":
        if spec.constraint is None:
            raise ValueError("uniform-safe initialization requires a constrained objective")
        for _ in range(_REJECTION_CAP):
            x = spec.domain.sample_uniform(rng)
            if spec.constraint(x) <= 0:
                return x
        raise RuntimeError(
            f"no safe point found in {_REJECTION_CAP} draws; the safe set is too small"
        )
    if mode == "levelset":
        if spec.permutation is not None or not spec.name.startswith("gaussian"):
            raise ValueError("level-set initialization is defined for the Gaussian benchmark only")
        if level is None:
            raise ValueError("level-set initialization needs a level value")
        radius = level_set_radius(level)
        if radius > min(spec.domain.upper.min(), -spec.domain.lower.max()):
            raise ValueError(f"level-set radius {radius:.4f} does not fit inside the domain")
        return radius * sample_sphere(spec.dim, rng)
    raise ValueError(f"unknown initialization mode {mode!r}")


def make_objective(name: str, dim: int = 10, augment_dims: int = 0,
                   augment_seed: int = 0, tau: float | None = None,
                   constraint_flip: bool = False) -> ObjectiveSpec:
    """Build a benchmark by name with optional augmentation and constraint."""
    key = name.strip().lower()
    if key not in BENCHMARKS:
        raise ValueError(f"unknown benchmark {name!r}; choose from {sorted(BENCHMARKS)}")
    spec = BENCHMARKS[key](dim) if key == "gaussian" else BENCHMARKS[key]()
    if augment_dims:
        spec = augment(spec, augment_dims, np.random.default_rng(augment_seed))
    if tau is not None:
        spec = constrain(spec, tau, flip=constraint_flip)
    return spec


BENCHMARKS = {
    "camelback": camelback_spec,
    "hartmann6": hartmann6_spec,
    "gaussian": gaussian_spec,
}
