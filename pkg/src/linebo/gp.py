"""Gaussian-process regression with exact incremental posterior updates.

The model keeps a Cholesky factor of the regularized Gram matrix
``K + jitter * I`` (``jitter`` defaults to the noise variance, floored at
1e-10) and extends it by one row per observation, so an update costs
O(n^2) rather than the O(n^3) of a refit.  Besides the usual predictive
mean and standard deviation it exposes the gradient of the posterior mean
and exact draws from the joint Gaussian law of the gradient at a point,
both derived from the kernel's analytic derivatives.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_solve, solve_triangular
from sklearn.base import BaseEstimator

from .exceptions import FactorizationError
from .kernels import RBF, Kernel
from .validation import as_matrix, as_vector, check_positive

__all__ = ["GaussianProcess"]

_JITTER_FLOOR = 1e-10
_JITTER_CAP = 1e-4


def _chol_with_jitter(K: np.ndarray, noise_var: float) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor of ``K + jitter * I`` with escalating jitter.

    The first attempt uses ``max(noise_var, 1e-10)``; on failure the jitter
    is multiplied by 10 up to 1e-4 before giving up.
    """
    jitter = max(noise_var, _JITTER_FLOOR)
    eye = np.eye(K.shape[0])
    while True:
        try:
            return np.linalg.cholesky(K + jitter * eye), jitter
        except np.linalg.LinAlgError:
            if jitter * 10.0 > _JITTER_CAP:
                raise FactorizationError(
                    f"Cholesky failed with jitter up to {jitter:g}; "
                    "training data is numerically degenerate"
                ) from None
            jitter *= 10.0


class GaussianProcess(BaseEstimator):
    """GP regressor with fixed hyperparameters and a prior mean of zero.

    A fresh (unfitted) instance behaves as the prior: mean 0 and standard
    deviation ``sqrt(kernel.variance)`` everywhere.  ``fit`` replaces the
    data; ``update`` appends one observation in place.  Read operations are
    safe to share across threads; writes (``fit``/``update``) assume a
    single writer.

    Parameters
    ----------
    kernel : Kernel, optional
        Covariance function; defaults to ``RBF(1.0, 1.0)``.
    noise_std : float
        Observation noise standard deviation (Gaussian likelihood).  Its
        square also acts as the Cholesky jitter floor.
    """

    def __init__(self, kernel: Kernel | None = None, noise_std: float = 0.1):
        self.kernel = kernel
        self.noise_std = noise_std

    # ------------------------------------------------------------------
    # state helpers
    # ------------------------------------------------------------------
    @property
    def kernel_fn(self) -> Kernel:
        return self.kernel if self.kernel is not None else RBF()

    @property
    def n_samples_(self) -> int:
        X = getattr(self, "X_", None)
        return 0 if X is None else X.shape[0]

    def _noise_var(self) -> float:
        check_positive(self.noise_std, "noise_std")
        return float(self.noise_std) ** 2

    # ------------------------------------------------------------------
    # fitting
    # ------------------------------------------------------------------
    def fit(self, X, y):
        """Fit the posterior from scratch on ``(X, y)``.

        An empty dataset resets the model to the prior.
        """
        noise_var = self._noise_var()
        X = as_matrix(X, name="X")
        y = np.asarray(y, dtype=float).reshape(-1)
        if X.shape[0] != y.shape[0]:
            raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
        if X.shape[0] == 0:
            self.X_ = None
            self.y_ = None
            self.L_ = None
            self.alpha_ = None
            self.jitter_ = max(noise_var, _JITTER_FLOOR)
            return self

        K = self.kernel_fn(X)
        L, jitter = _chol_with_jitter(K, noise_var)
        self.X_ = X.copy()
        self.y_ = y.copy()
        self.L_ = L
        self.alpha_ = cho_solve((L, True), y)
        self.jitter_ = jitter
        return self

    def update(self, x, y: float):
        """Append one observation, extending the Cholesky factor in place.

        Equivalent (to numerical tolerance) to refitting on the extended
        dataset, at quadratic instead of cubic cost.
        """
        if self.n_samples_ == 0:
            return self.fit(np.atleast_2d(np.asarray(x, dtype=float)), [y])

        x = as_vector(x, dim=self.X_.shape[1], name="x")
        k_new = self.kernel_fn(self.X_, x[None, :])[:, 0]
        ell = solve_triangular(self.L_, k_new, lower=True)
        lam_sq = self.kernel_fn.variance + self.jitter_ - ell @ ell
        if lam_sq <= 0.0:
            # Schur complement lost positivity to rounding; rebuild with
            # the escalation policy instead of patching the factor.
            X_new = np.vstack([self.X_, x[None, :]])
            y_new = np.append(self.y_, float(y))
            return self.fit(X_new, y_new)

        n = self.n_samples_
        L = np.zeros((n + 1, n + 1))
        L[:n, :n] = self.L_
        L[n, :n] = ell
        L[n, n] = np.sqrt(lam_sq)
        self.L_ = L
        self.X_ = np.vstack([self.X_, x[None, :]])
        self.y_ = np.append(self.y_, float(y))
        self.alpha_ = cho_solve((L, True), self.y_)
        return self

    # ------------------------------------------------------------------
    # prediction
    # ------------------------------------------------------------------
    def predict(self, X, return_std: bool = False):
        """Posterior mean (and standard deviation) at the query points.

        Returns the latent-function std, i.e. without the observation
        noise, clamped at zero from below.
        """
        X = as_matrix(X, name="X")
        if self.n_samples_ == 0:
            mean = np.zeros(X.shape[0])
            if not return_std:
                return mean
            return mean, np.sqrt(self.kernel_fn.diag(X))

        Ks = self.kernel_fn(self.X_, X)
        mean = Ks.T @ self.alpha_
        if not return_std:
            return mean
        V = solve_triangular(self.L_, Ks, lower=True)
        var = self.kernel_fn.diag(X) - np.einsum("ij,ij->j", V, V)
        return mean, np.sqrt(np.maximum(var, 0.0))

    def mean_gradient(self, x) -> np.ndarray:
        """Gradient of the posterior mean at ``x``."""
        x = as_vector(x, name="x")
        if self.n_samples_ == 0:
            return np.zeros_like(x)
        G = self.kernel_fn.gradient(x, self.X_)
        return G.T @ self.alpha_

    def sample_gradient(self, x, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
        """Draw from the joint Gaussian posterior of the gradient at ``x``.

        The law is exact: its mean is ``mean_gradient(x)`` and its
        covariance combines the kernel's second-derivative prior variance
        with the data through the stored factorization.  Deterministic for
        a given generator state.  Returns shape ``(d,)``, or ``(size, d)``
        when ``size`` is given.
        """
        x = as_vector(x, name="x")
        d = x.shape[0]
        c = self.kernel_fn.gradient_prior_var()
        mean = self.mean_gradient(x)
        if self.n_samples_ == 0:
            cov_root = np.sqrt(c) * np.eye(d)
        else:
            G = self.kernel_fn.gradient(x, self.X_)
            V = solve_triangular(self.L_, G, lower=True)
            cov = c * np.eye(d) - V.T @ V
            cov_root = self._factor_cov(cov, scale=c)
        z = rng.standard_normal(d if size is None else (size, d))
        return mean + z @ cov_root.T

    @staticmethod
    def _factor_cov(cov: np.ndarray, scale: float) -> np.ndarray:
        jitter = 1e-12 * scale
        eye = np.eye(cov.shape[0])
        while True:
            try:
                return np.linalg.cholesky(cov + jitter * eye)
            except np.linalg.LinAlgError:
                if jitter > 1e-4 * scale:
                    raise FactorizationError(
                        "gradient covariance is not positive definite"
                    ) from None
                jitter *= 10.0
