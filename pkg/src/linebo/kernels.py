"""Stationary covariance kernels with analytic input-space gradients.

Every kernel is isotropic, ``k(x, x') = kappa(||x - x'||)``, parameterized by a
shared ``lengthscale`` and an output ``variance`` (so ``k(x, x) = variance``).
Besides the Gram matrix, each kernel exposes the gradient of ``k(x, .)`` with
respect to the first argument and the per-coordinate prior variance of the
derivative process, which together determine the joint Gaussian law of a
posterior gradient.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist

from .validation import as_matrix, as_vector, check_positive

__all__ = ["Kernel", "RBF", "Matern32", "Matern52", "make_kernel", "KERNELS"]


class Kernel:
    """Base class for isotropic stationary kernels.

    Parameters
    ----------
    lengthscale : float
        Positive length scale, shared across input dimensions.
    variance : float
        Prior variance at zero lag (output scale squared).
    """

    def __init__(self, lengthscale=1.0, variance=1.0):
        self.lengthscale = check_positive(lengthscale, "lengthscale")
        self.variance = check_positive(variance, "variance")

    def __call__(self, X, Y=None) -> np.ndarray:
        """Gram matrix ``k(X, Y)`` with shape ``(len(X), len(Y))``."""
        X = as_matrix(X, name="X")
        Y = X if Y is None else as_matrix(Y, dim=X.shape[1], name="Y")
        return self._from_distance(cdist(X, Y))

    def diag(self, X) -> np.ndarray:
        """Diagonal of the Gram matrix, ``k(x, x)`` for each row of ``X``."""
        X = as_matrix(X, name="X")
        return np.full(X.shape[0], self.variance)

    def gradient(self, x, X) -> np.ndarray:
        """Gradients ``d k(x, X_i) / d x``, one row per point of ``X``.

        At zero lag the analytic limit (the zero vector) is returned for
        all families, including Matern 3/2 whose higher derivatives are
        not continuous there.
        """
        x = as_vector(x, name="x")
        X = as_matrix(X, dim=x.shape[0], name="X")
        diff = x[None, :] - X
        r = np.linalg.norm(diff, axis=1)
        return self._radial_gradient_factor(r)[:, None] * diff

    def gradient_prior_var(self) -> float:
        """Per-coordinate prior variance of ``df/dx_i`` under this kernel."""
        raise NotImplementedError

    def _from_distance(self, r):
        raise NotImplementedError

    def _radial_gradient_factor(self, r):
        """Scalar ``c(r)`` such that ``grad_x k = c(r) * (x - x')``."""
        raise NotImplementedError

    def __repr__(self):
        return (f"{type(self).__name__}(lengthscale={self.lengthscale!r}, "
                f"variance={self.variance!r})")


class RBF(Kernel):
    """Squared-exponential kernel ``v * exp(-r^2 / (2 l^2))``."""

    def _from_distance(self, r):
        return self.variance * np.exp(-0.5 * (r / self.lengthscale) ** 2)

    def _radial_gradient_factor(self, r):
        return -self._from_distance(r) / self.lengthscale**2

    def gradient_prior_var(self):
        return self.variance / self.lengthscale**2


class Matern32(Kernel):
    """Matern kernel with smoothness 3/2: ``v * (1 + a r) * exp(-a r)``, ``a = sqrt(3)/l``."""

    def _from_distance(self, r):
        a = np.sqrt(3.0) / self.lengthscale
        return self.variance * (1.0 + a * r) * np.exp(-a * r)

    def _radial_gradient_factor(self, r):
        a = np.sqrt(3.0) / self.lengthscale
        return -self.variance * a**2 * np.exp(-a * r)

    def gradient_prior_var(self):
        return 3.0 * self.variance / self.lengthscale**2


class Matern52(Kernel):
    """Matern kernel with smoothness 5/2: ``v * (1 + b r + b^2 r^2 / 3) * exp(-b r)``."""

    def _from_distance(self, r):
        b = np.sqrt(5.0) / self.lengthscale
        return self.variance * (1.0 + b * r + (b * r) ** 2 / 3.0) * np.exp(-b * r)

    def _radial_gradient_factor(self, r):
        b = np.sqrt(5.0) / self.lengthscale
        return -(self.variance * b**2 / 3.0) * (1.0 + b * r) * np.exp(-b * r)

    def gradient_prior_var(self):
        return 5.0 * self.variance / (3.0 * self.lengthscale**2)


KERNELS = {"rbf": RBF, "matern32": Matern32, "matern52": Matern52}


def make_kernel(family: str, lengthscale=1.0, variance=1.0) -> Kernel:
    """Instantiate a kernel by family name (``rbf``, ``matern32``, ``matern52``)."""
    key = family.strip().lower()
    if key not in KERNELS:
        raise ValueError(f"unknown kernel family {family!r}; choose from {sorted(KERNELS)}")
    return KERNELS[key](lengthscale=lengthscale, variance=variance)
