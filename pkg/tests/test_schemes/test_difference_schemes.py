"""Test the difference schemes against their series representations."""

import math

from wickfbm import hermite, kernel, schemes, symfun, test_util, walsh
from wickfbm.backend import np, prng, testing


def case_scheme_geometric():
    return schemes.geometric()


def case_scheme_drift():
    return schemes.drift(0.3, 0.8, 2.0)


def case_scheme_linear_system():
    return schemes.linear_system(0.3, -0.5, 0.8, 0.1, 1.0, 2.0)


def case_scheme_sin_cos():
    return schemes.sin_cos()


@testing.parametrize_with_cases("spec", cases=".", prefix="case_scheme_")
def test_exact_solution_matches_the_series_solution(spec, n=6):
    grid = kernel.build_grid(0.75, n)
    exact = schemes.solve_scheme_exact(grid, spec)
    series = schemes.series_solution_exact(grid, spec)
    assert len(exact) == len(series) == n + 1
    for exact_l, series_l in zip(exact, series):
        assert len(exact_l) == len(schemes.components(spec))
        for x, y in zip(exact_l, series_l):
            assert np.allclose(x.coeffs, y.coeffs, rtol=1e-10, atol=1e-13)


@testing.parametrize("n", [4, 10])
def test_geometric_scheme_has_unit_expectation(n):
    grid = kernel.build_grid(0.75, n)
    for (s,) in schemes.iterate_scheme_exact(grid, schemes.geometric()):
        assert np.allclose(walsh.expectation(s), 1.0)


@testing.mark_slow()
def test_geometric_scheme_has_unit_expectation_on_a_fine_grid(n=16):
    grid = kernel.build_grid(0.75, n)
    (s,) = schemes.solve_scheme_exact(grid, schemes.geometric())[-1]
    assert np.allclose(walsh.expectation(s), 1.0)


def test_drift_scheme_factorises(n=6):
    grid = kernel.build_grid(0.75, n)
    spec = schemes.drift(-0.4, 1.2, 3.0)
    exact = schemes.solve_scheme_exact(grid, spec)
    factors = schemes.drift_factors(grid, spec)
    for l, ((s,), (v, w)) in enumerate(zip(exact, factors)):
        assert np.allclose(w, (1 - 0.4 / n) ** l * 3.0)
        assert np.allclose(s.coeffs, w * v.coeffs, rtol=1e-12, atol=1e-14)
        assert np.allclose(walsh.expectation(s), w)


def test_drift_factors_need_the_drift_scheme():
    grid = test_util.random_grid(prng.prng_key(1), 3)
    with testing.raises(ValueError, match="drift"):
        schemes.drift_factors(grid, schemes.geometric())


def test_drift_without_geometric_factor_raises(n=3):
    grid = test_util.random_grid(prng.prng_key(1), n)
    spec = schemes.drift(-float(n), 1.0)
    with testing.raises(ValueError, match="1 \\+ mu/n"):
        schemes.scheme_coefficients(spec, n)
    with testing.raises(ValueError, match="1 \\+ mu/n"):
        schemes.drift_factors(grid, spec)

    # The exact recursion has no division and stays available
    exact = schemes.solve_scheme_exact(grid, spec)
    (s,) = exact[-1]
    assert np.allclose(walsh.expectation(s), 0.0)


def test_pathwise_scheme_matches_the_ordinary_product(n=6):
    grid = kernel.build_grid(0.75, n)
    exact = schemes.solve_scheme_exact(grid, schemes.pathwise_sottinen())
    paths = walsh.all_paths(n)
    for j in (0, 7, 33):
        values = schemes.sottinen_pathwise(grid, paths[j])
        for l in range(n + 1):
            (x,) = exact[l]
            assert np.allclose(walsh.evaluate(x, paths[j]), values[l])

    for t in (0.5, 1.0):
        l = kernel.lattice_index(n, t)
        (received,) = schemes.scheme_series_paths(
            grid, schemes.pathwise_sottinen(), t, paths
        )
        (x,) = exact[l]
        assert np.allclose(received, walsh.evaluate_all_paths(x))


def test_pathwise_scheme_has_no_series():
    grid = test_util.random_grid(prng.prng_key(2), 4)
    signs = np.ones((4,))
    with testing.raises(hermite.CertificateError):
        schemes.scheme_series_path(grid, schemes.pathwise_sottinen(), 1.0, signs)
    with testing.raises(hermite.CertificateError):
        schemes.series_solution_exact(grid, schemes.pathwise_sottinen())


def test_series_path_of_the_geometric_scheme_is_a_product(n=12, t=0.75):
    grid = kernel.build_grid(0.75, n)
    signs = np.asarray(prng.rademacher(prng.prng_key(3), shape=(n,)), dtype=float)
    (received,) = schemes.scheme_series_path(grid, schemes.geometric(), t, signs)
    l = kernel.lattice_index(n, t)
    expected = np.prod(1 + grid.b[l] * signs)
    assert np.allclose(received, expected, rtol=1e-12)


def test_series_path_of_the_drift_scheme_carries_the_prefactor(n=8, t=0.5):
    grid = kernel.build_grid(0.75, n)
    spec = schemes.drift(0.5, 1.0, 2.0)
    signs = np.asarray(prng.rademacher(prng.prng_key(4), shape=(n,)), dtype=float)
    (received,) = schemes.scheme_series_path(grid, spec, t, signs)
    sigma_n = 1.0 / (1 + 0.5 / n)
    coeffs = hermite.exponential_coeffs(sigma_n)
    series = symfun.wick_series_path(grid, t, coeffs, signs)
    assert np.allclose(received, (1 + 0.5 / n) ** 4 * 2.0 * series)


def test_series_paths_match_single_paths(n=8, t=1.0):
    grid = kernel.build_grid(0.75, n)
    paths = walsh.all_paths(n)[:20]
    x_batch, y_batch = schemes.scheme_series_paths(grid, schemes.sin_cos(), t, paths)
    for j in (0, 11, 19):
        x, y = schemes.scheme_series_path(grid, schemes.sin_cos(), t, paths[j])
        assert np.allclose(x_batch[j], x)
        assert np.allclose(y_batch[j], y)


def test_sine_cosine_coefficients():
    a, b = schemes.linear_system_coefficients(schemes.sin_cos(), 5)
    assert a.tolist() == [0.0, 1.0, 0.0, -1.0, 0.0, 1.0]
    assert b.tolist() == [1.0, 0.0, -1.0, 0.0, 1.0, 0.0]


@testing.parametrize_with_cases("spec", cases=".", prefix="case_scheme_")
def test_coefficients_respect_their_certificate(spec, order=50):
    for coeffs in schemes.scheme_coefficients(spec, 16):
        a = hermite.coefficients(coeffs, order)
        assert np.shape(a) == (order + 1,)


def test_linear_system_coefficients_respect_the_growth_bound(order=50):
    spec = schemes.linear_system(0.3, -0.5, 0.8, 0.1, 1.0, 2.0)
    a, b = schemes.linear_system_coefficients(spec, order)
    growth = np.asarray(
        [max(abs(spec.x0), abs(spec.y0)) * 1.6**k for k in range(order + 1)]
    )
    assert np.all(np.abs(a) <= growth * (1 + 1e-12))
    assert np.all(np.abs(b) <= growth * (1 + 1e-12))


def test_linear_combinations_of_the_components_respect_the_growth_bound(order=50):
    # Certifies the joint law through every projection u x + v y
    spec = schemes.linear_system(0.3, -0.5, 0.8, 0.1, 1.0, 2.0)
    a, b = schemes.linear_system_coefficients(spec, order)
    for angle in np.linspace(0.0, math.pi, num=7).tolist():
        u, v = math.cos(angle), math.sin(angle)
        combined = np.abs(u * a + v * b)
        growth = (abs(u) + abs(v)) * 2.0 * 1.6 ** np.arange(order + 1.0)
        assert np.all(combined <= growth * (1 + 1e-12))


def test_scheme_names():
    assert schemes.scheme_from_name("geometric") == schemes.geometric()
    drift = schemes.scheme_from_name("drift", mu=0.1, sigma=2.0, a1=5.0)
    assert drift == schemes.drift(0.1, 2.0)
    assert schemes.components(schemes.sin_cos()) == ("x", "y")
    assert schemes.components(drift) == ("s",)
    assert set(schemes.VARIANTS) == {
        "geometric",
        "drift",
        "linear_system",
        "sin_cos",
        "pathwise_sottinen",
    }


def test_invalid_schemes_raise():
    with testing.raises(ValueError, match="Unknown scheme"):
        schemes.scheme_from_name("heston")
    with testing.raises(ValueError, match="needs the parameters"):
        schemes.scheme_from_name("linear_system", a1=1.0)
    with testing.raises(ValueError, match="volatility"):
        schemes.drift(0.0, 0.0)


def test_geometric_limit_has_unit_mean(count=20_000):
    (samples,) = schemes.limit_samples(schemes.geometric(), 0.75, 1.0, count, 0)
    std = math.sqrt(math.e - 1)
    assert abs(float(np.mean(samples)) - 1.0) < 5 * std / math.sqrt(count)


def test_sine_cosine_limit_satisfies_the_pythagorean_identity(count=1000):
    # sin(x)^2 + cos(x)^2 = e^{sigma^2} for the Wick versions
    x, y = schemes.limit_samples(schemes.sin_cos(), 0.75, 0.5, count, 1)
    sigma2 = 0.5**1.5
    assert np.allclose(x**2 + y**2, math.exp(sigma2), rtol=1e-9)
