"""Test Wick analytic functionals of a single Gaussian."""

import math

from wickfbm import hermite
from wickfbm.backend import np, testing


def case_coeffs_sine():
    def closed_form(sigma2, x):
        return np.exp(sigma2 / 2) * np.sin(x)

    return hermite.sine_coeffs(), closed_form


def case_coeffs_cosine():
    def closed_form(sigma2, x):
        return np.exp(sigma2 / 2) * np.cos(x)

    return hermite.cosine_coeffs(), closed_form


def case_coeffs_exponential():
    def closed_form(sigma2, x):
        return np.exp(0.5 * x - 0.25 * sigma2 / 2)

    return hermite.exponential_coeffs(0.5), closed_form


@testing.parametrize_with_cases("coeffs, closed_form", cases=".", prefix="case_coeffs_")
@testing.parametrize("sigma2", [0.3, 1.0])
def test_series_matches_closed_form(coeffs, closed_form, sigma2):
    x = np.linspace(-3.0, 3.0, num=13)
    result = hermite.gaussian_wick_functional(coeffs, sigma2, x, tail_tol=1e-13)
    assert result.tail_bound <= 1e-13
    assert np.allclose(result.value, closed_form(sigma2, x), rtol=1e-10, atol=1e-12)


def test_wick_exponential_matches_the_series(sigma2=0.8):
    x = np.linspace(-2.0, 2.0, num=5)
    series = hermite.gaussian_wick_functional(hermite.exponential_coeffs(), sigma2, x)
    closed_form = hermite.wick_exponential(sigma2, x)
    assert np.allclose(series.value, closed_form, rtol=1e-10)


def test_wick_power_coefficients_give_the_hermite_polynomial(sigma2=0.6, N=4):
    x = np.linspace(-2.0, 2.0, num=7)
    result = hermite.gaussian_wick_functional(hermite.wick_power_coeffs(N), sigma2, x)
    assert np.allclose(result.value, hermite.hermite_poly(N, sigma2, x), rtol=1e-10)


def test_identity_coefficients_give_the_argument():
    x = np.asarray([-1.0, 0.5])
    result = hermite.gaussian_wick_functional(hermite.identity_coeffs(), 1.0, x, 3)
    assert result.order == 3
    assert np.allclose(result.value, x)


def test_explicit_order_reports_its_tail_bound():
    coeffs = hermite.exponential_coeffs()
    short = hermite.gaussian_wick_functional(coeffs, 1.0, 0.0, 3)
    long = hermite.gaussian_wick_functional(coeffs, 1.0, 0.0, 20)
    assert short.tail_bound > long.tail_bound > 0.0


def test_truncation_order_grows_with_the_tolerance():
    coeffs = hermite.exponential_coeffs(2.0)
    loose = hermite.truncation_order(coeffs, 1.0, 1e-3)
    tight = hermite.truncation_order(coeffs, 1.0, 1e-12)
    assert loose < tight


def test_truncation_failure_raises():
    coeffs = hermite.exponential_coeffs(10.0)
    with testing.raises(hermite.TruncationError):
        hermite.truncation_order(coeffs, 100.0, 1e-12, max_order=5)


def test_coefficient_certificates():
    a = hermite.coefficients(hermite.sine_coeffs(), 5)
    assert a.tolist() == [0.0, 1.0, 0.0, -1.0, 0.0, 1.0]

    bad = hermite.coeffs_from_sequence([1.0, 5.0], growth=2.0)
    with testing.raises(hermite.CertificateError, match="exceeds"):
        hermite.coefficients(bad, 3)

    missing = hermite.coeffs_from_sequence([1.0], growth=None)
    with testing.raises(hermite.CertificateError, match="no growth certificate"):
        hermite.coefficients(missing, 3)

    scaled = hermite.coeffs_from_sequence([4.0, 2.0], growth=1.0, scale=4.0)
    assert hermite.coefficients(scaled, 3).tolist() == [4.0, 2.0, 0.0, 0.0]


def test_wick_power_certificate_is_tight():
    coeffs = hermite.wick_power_coeffs(6)
    a = hermite.coefficients(coeffs, 6)
    assert a[6] == math.factorial(6)
