"""Box domains, one-dimensional affine restrictions, and direction sampling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .validation import as_vector

__all__ = [
    "BoxDomain",
    "LineSegment",
    "intersect",
    "sample_sphere",
    "coordinate_direction",
]

#: Points may leave the box by at most this much before embed() refuses them.
EMBED_TOL = 1e-9

#: Directions with a norm below this are rejected as degenerate.
DIRECTION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class BoxDomain:
    """Axis-aligned box ``[lower_i, upper_i]`` in d dimensions."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = as_vector(self.lower, name="lower")
        upper = as_vector(self.upper, dim=lower.shape[0], name="upper")
        if not np.all(lower < upper):
            raise ValueError("every lower bound must be strictly below its upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def contains(self, x, atol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - atol) and np.all(x <= self.upper + atol))

    def clip(self, x) -> np.ndarray:
        return np.clip(np.asarray(x, dtype=float), self.lower, self.upper)

    def sample_uniform(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
        shape = self.dim if size is None else (size, self.dim)
        return rng.uniform(self.lower, self.upper, size=shape)


@dataclass(frozen=True, eq=False)
class LineSegment:
    """Affine restriction ``{offset + a * direction : a in [alpha_lo, alpha_hi]}``.

    ``direction`` has unit norm, so the scalar coordinate ``a`` measures
    Euclidean distance along the line.  The offset itself is always on the
    segment (``alpha_lo <= 0 <= alpha_hi``).
    """

    offset: np.ndarray
    direction: np.ndarray
    alpha_lo: float
    alpha_hi: float
    domain: BoxDomain = field(repr=False)

    @property
    def length(self) -> float:
        return self.alpha_hi - self.alpha_lo

    def embed(self, a: float) -> np.ndarray:
        """Map the scalar coordinate ``a`` to a point inside the box."""
        if a < self.alpha_lo - EMBED_TOL or a > self.alpha_hi + EMBED_TOL:
            raise ValueError(
                f"alpha={a!r} outside [{self.alpha_lo!r}, {self.alpha_hi!r}]"
            )
        a = min(max(a, self.alpha_lo), self.alpha_hi)
        return self.domain.clip(self.offset + a * self.direction)

    def embed_many(self, alphas) -> np.ndarray:
        """Vectorized :meth:`embed` for an array of scalar coordinates."""
        alphas = np.asarray(alphas, dtype=float)
        if alphas.size and (
            alphas.min() < self.alpha_lo - EMBED_TOL
            or alphas.max() > self.alpha_hi + EMBED_TOL
        ):
            raise ValueError("some alphas lie outside the segment range")
        alphas = np.clip(alphas, self.alpha_lo, self.alpha_hi)
        points = self.offset[None, :] + alphas[:, None] * self.direction[None, :]
        return np.clip(points, self.domain.lower, self.domain.upper)


def intersect(domain: BoxDomain, offset, direction) -> LineSegment:
    """Maximal segment of the line through ``offset`` along ``direction`` inside the box.

    The direction is normalized internally; the scalar range is computed
    exactly per coordinate and intersected.  A corner offset whose direction
    points outside every free coordinate yields a degenerate single-point
    segment.
    """
    offset = as_vector(offset, dim=domain.dim, name="offset")
    direction = as_vector(direction, dim=domain.dim, name="direction")
    norm = np.linalg.norm(direction)
    if norm < DIRECTION_TOL:
        raise ValueError("direction has (near-)zero norm")
    if not domain.contains(offset, atol=EMBED_TOL):
        raise ValueError("offset lies outside the domain")
    unit = direction / norm

    with np.errstate(divide="ignore", invalid="ignore"):
        t_lower = (domain.lower - offset) / unit
        t_upper = (domain.upper - offset) / unit
    moving = unit != 0.0
    alpha_lo = float(np.minimum(t_lower, t_upper)[moving].max())
    alpha_hi = float(np.maximum(t_lower, t_upper)[moving].min())
    # The offset is inside the box up to rounding, so 0 belongs to the range.
    alpha_lo = min(alpha_lo, 0.0)
    alpha_hi = max(alpha_hi, 0.0)
    return LineSegment(offset=offset, direction=unit, alpha_lo=alpha_lo,
                       alpha_hi=alpha_hi, domain=domain)


def sample_sphere(d: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Uniform draw(s) from the unit sphere in d dimensions.

    Standard-normal vectors normalized to unit length; deterministic for a
    given generator state.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    z = rng.standard_normal((1 if size is None else size, d))
    norms = np.linalg.norm(z, axis=1)
    while np.any(norms < DIRECTION_TOL):  # pragma: no cover - astronomically rare
        bad = norms < DIRECTION_TOL
        z[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(z, axis=1)
    unit = z / norms[:, None]
    return unit[0] if size is None else unit


def coordinate_direction(d: int, index: int | None = None,
                         rng: np.random.Generator | None = None) -> np.ndarray:
    """Standard basis vector ``e_index``, or a uniformly random one if ``rng`` is given."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if index is None:
        if rng is None:
            raise ValueError("provide either an index or a random generator")
        index = int(rng.integers(d))
    if not 0 <= index < d:
        raise ValueError(f"coordinate index {index} out of range for dimension {d}")
    e = np.zeros(d)
    e[index] = 1.0
    return e
