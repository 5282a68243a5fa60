"""Kernel values, symmetry, and analytic gradients."""

import numpy as np
import pytest

from linebo.kernels import RBF, Matern32, Matern52, make_kernel

FAMILIES = [RBF, Matern32, Matern52]

# Frozen closed-form values at unit lengthscale/variance and lag r = 1,
# computed with arbitrary-precision arithmetic.
VALUE_AT_UNIT_LAG = {
    Matern32: 0.48335772459650765,   # (1 + sqrt(3)) exp(-sqrt(3))
    Matern52: 0.52399410883182031,   # (1 + sqrt(5) + 5/3) exp(-sqrt(5))
}


@pytest.mark.parametrize("family", FAMILIES)
def test_zero_lag_equals_variance(family):
    rng = np.random.default_rng(0)
    for _ in range(20):
        variance = rng.uniform(0.1, 5.0)
        kern = family(lengthscale=rng.uniform(0.1, 3.0), variance=variance)
        x = rng.uniform(-2, 2, 4)
        assert kern(x[None, :], x[None, :])[0, 0] == pytest.approx(variance, rel=1e-12)


@pytest.mark.parametrize("family", FAMILIES)
def test_symmetry(family):
    rng = np.random.default_rng(1)
    kern = family(lengthscale=0.8, variance=1.7)
    X = rng.uniform(-2, 2, (6, 3))
    K = kern(X)
    np.testing.assert_allclose(K, K.T, atol=1e-14)


def test_rbf_at_sqrt2_lag():
    kern = RBF(lengthscale=1.0, variance=1.0)
    x = np.array([[1.0, 1.0]])
    y = np.array([[0.0, 0.0]])
    assert kern(x, y)[0, 0] == pytest.approx(np.exp(-1.0), abs=1e-12)


@pytest.mark.parametrize("family", [Matern32, Matern52])
def test_matern_value_at_unit_lag(family):
    kern = family(lengthscale=1.0, variance=1.0)
    value = kern(np.array([[1.0]]), np.array([[0.0]]))[0, 0]
    assert value == pytest.approx(VALUE_AT_UNIT_LAG[family], abs=1e-12)


def test_dimension_mismatch_raises():
    kern = RBF()
    with pytest.raises(ValueError):
        kern(np.zeros((1, 2)), np.zeros((1, 3)))
    with pytest.raises(ValueError):
        kern.gradient(np.zeros(2), np.zeros((1, 3)))


@pytest.mark.parametrize("family", FAMILIES)
def test_gradient_zero_at_zero_lag(family):
    kern = family(lengthscale=0.9, variance=2.0)
    x = np.array([0.3, -0.7])
    np.testing.assert_array_equal(kern.gradient(x, x[None, :])[0], np.zeros(2))


def test_rbf_gradient_closed_form():
    kern = RBF(lengthscale=1.0, variance=1.0)
    grad = kern.gradient(np.array([1.0, 0.0]), np.array([[0.0, 0.0]]))[0]
    np.testing.assert_allclose(grad, [-np.exp(-0.5), 0.0], atol=1e-14)


@pytest.mark.parametrize("family", FAMILIES)
def test_gradient_matches_finite_differences(family):
    rng = np.random.default_rng(2)
    kern = family(lengthscale=0.6, variance=1.4)
    step = 1e-6
    for _ in range(10):
        x = rng.uniform(-1, 1, 3)
        x2 = rng.uniform(-1, 1, 3)
        grad = kern.gradient(x, x2[None, :])[0]
        fd = np.empty(3)
        for i in range(3):
            e = np.zeros(3)
            e[i] = step
            hi = kern((x + e)[None, :], x2[None, :])[0, 0]
            lo = kern((x - e)[None, :], x2[None, :])[0, 0]
            fd[i] = (hi - lo) / (2 * step)
        np.testing.assert_allclose(grad, fd, rtol=1e-5, atol=1e-8)


@pytest.mark.parametrize("family", FAMILIES)
def test_gradient_prior_var_matches_second_difference(family):
    # The per-coordinate derivative variance is -phi''(0) for the radial
    # profile phi(t) = k(x + t e_i, x); check against a central second
    # difference.
    kern = family(lengthscale=0.7, variance=1.9)
    h = 1e-4
    x = np.zeros(2)
    phi = lambda t: kern(np.array([[t, 0.0]]), x[None, :])[0, 0]  # noqa: E731
    second = (phi(h) - 2.0 * phi(0.0) + phi(-h)) / h**2
    assert kern.gradient_prior_var() == pytest.approx(-second, rel=1e-3)


def test_make_kernel_and_validation():
    kern = make_kernel("matern52", lengthscale=0.5, variance=2.0)
    assert isinstance(kern, Matern52)
    with pytest.raises(ValueError):
        make_kernel("cubic")
    with pytest.raises(ValueError):
        RBF(lengthscale=0.0)
    with pytest.raises(ValueError):
        RBF(variance=-1.0)
