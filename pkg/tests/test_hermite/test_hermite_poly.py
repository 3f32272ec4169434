"""Test the Hermite polynomials with variance parameter."""

import math

from wickfbm import hermite, quadrature
from wickfbm.backend import np, testing


def test_low_degrees_match_closed_forms(sigma2=0.7):
    x = np.linspace(-2.0, 2.0, num=9)
    assert np.allclose(hermite.hermite_poly(0, sigma2, x), 1.0)
    assert np.allclose(hermite.hermite_poly(1, sigma2, x), x)
    assert np.allclose(hermite.hermite_poly(2, sigma2, x), x**2 - sigma2)
    assert np.allclose(hermite.hermite_poly(3, sigma2, x), x**3 - 3 * sigma2 * x)


@testing.parametrize("sigma2", [1.0, 0.25])
def test_polynomials_are_orthogonal_under_the_gaussian(sigma2, order=6):
    nodes, weights = quadrature.gauss_hermite(20, sigma2)
    table = [hermite.hermite_poly(k, sigma2, nodes) for k in range(order + 1)]
    for j in range(order + 1):
        for k in range(order + 1):
            received = np.sum(weights * table[j] * table[k])
            expected = math.factorial(k) * sigma2**k if j == k else 0.0
            assert np.allclose(received, expected, atol=1e-10)


def test_normalised_table_divides_by_factorials(sigma2=1.3, order=12):
    x = np.asarray([-1.5, 0.0, 0.4, 3.0])
    table = hermite.normalised_hermite_table(order, sigma2, x)
    assert np.shape(table) == (order + 1, 4)
    for k in range(order + 1):
        expected = hermite.hermite_poly(k, sigma2, x) / math.factorial(k)
        assert np.allclose(table[k], expected, rtol=1e-10, atol=1e-14)


def test_zero_variance_gives_monomials():
    x = np.asarray([0.5, -2.0])
    assert np.allclose(hermite.hermite_poly(4, 0.0, x), x**4)


def test_invalid_arguments_raise():
    with testing.raises(ValueError, match="variance"):
        hermite.hermite_poly(2, -0.1, 1.0)
    with testing.raises(ValueError, match="degree"):
        hermite.hermite_poly(-1, 1.0, 1.0)
