"""Test the Gauss-Hermite rule for Gaussian expectations."""

from wickfbm import quadrature
from wickfbm.backend import np, testing


@testing.parametrize("sigma2", [1.0, 0.3])
def test_moments_match_the_gaussian(sigma2, order=10):
    nodes, weights = quadrature.gauss_hermite(order, sigma2)
    assert np.allclose(np.sum(weights), 1.0)
    assert np.allclose(np.sum(weights * nodes), 0.0, atol=1e-14)
    assert np.allclose(np.sum(weights * nodes**2), sigma2)
    assert np.allclose(np.sum(weights * nodes**4), 3 * sigma2**2)
    assert np.allclose(np.sum(weights * nodes**6), 15 * sigma2**3)


def test_negative_variance_raises():
    with testing.raises(ValueError, match="nonnegative"):
        quadrature.gauss_hermite(4, -1.0)
