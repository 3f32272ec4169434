"""Test the samplers of the limit laws."""

import math

from wickfbm import hermite, kernel
from wickfbm.backend import np, testing


def test_gaussian_samples_are_deterministic_per_index():
    first = hermite.gaussian_samples(10, 3)
    assert np.all(first == hermite.gaussian_samples(10, 3))
    assert np.all(first[:5] == hermite.gaussian_samples(5, 3))
    assert not np.any(first == hermite.gaussian_samples(10, 3, stream=1))


def test_gaussian_samples_are_standard(count=20_000):
    samples = hermite.gaussian_samples(count, 0)
    assert abs(float(np.mean(samples))) < 5 / math.sqrt(count)
    assert abs(float(np.var(samples)) - 1.0) < 5 * math.sqrt(2 / count)


def test_wick_exponential_marginal_has_unit_mean(count=20_000, hurst=0.75, t=1.0):
    samples = hermite.limit_marginal_sampler(
        hermite.exponential_coeffs(), hurst, t, count, 1
    )
    std = math.sqrt(math.e - 1)
    assert abs(float(np.mean(samples)) - 1.0) < 5 * std / math.sqrt(count)


def test_pathwise_sampler_is_lognormal(count=20_000, hurst=0.75, t=0.5):
    samples = hermite.pathwise_limit_sampler(hurst, t, count, 2)
    assert np.all(samples > 0)
    sigma2 = t ** (2 * hurst)
    mean = math.exp(sigma2 / 2)
    std = math.sqrt((math.exp(sigma2) - 1) * math.exp(sigma2))
    assert abs(float(np.mean(samples)) - mean) < 5 * std / math.sqrt(count)


def test_invalid_times_raise():
    with testing.raises(ValueError, match="time"):
        hermite.pathwise_limit_sampler(0.75, 0.0, 10, 0)
    with testing.raises(ValueError, match="time"):
        hermite.limit_marginal_sampler(hermite.sine_coeffs(), 0.75, 1.5, 10, 0)


def test_increment_norm_of_the_first_power_is_the_fbm_increment(hurst=0.7):
    t, s = 0.9, 0.4
    received = hermite.wick_power_increment_norm(hurst, t, s, 1)
    assert np.allclose(received, (t - s) ** (2 * hurst))

    # Second power: 2 (t^4H + s^4H - 2 R^2)
    r = kernel.fbm_covariance(hurst, t, s)
    expected = 2 * (t ** (4 * hurst) + s ** (4 * hurst) - 2 * r**2)
    assert np.allclose(hermite.wick_power_increment_norm(hurst, t, s, 2), expected)
