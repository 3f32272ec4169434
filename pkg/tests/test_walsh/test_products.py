"""Test the Wick product and the pointwise product of Walsh vectors."""

from wickfbm import test_util, walsh
from wickfbm.backend import np, prng, testing


def test_wick_product_of_basis_elements():
    n = 3
    xi_1 = walsh.basis(n, [1])
    xi_2 = walsh.basis(n, [2])
    product = walsh.wick_product(xi_1, xi_2)
    assert np.all(product.coeffs == walsh.basis(n, [1, 2]).coeffs)
    assert np.all(walsh.wick_product(xi_1, xi_1).coeffs == 0.0)


def test_pointwise_product_of_basis_elements():
    n = 3
    xi_12 = walsh.basis(n, [1, 2])
    xi_23 = walsh.basis(n, [2, 3])
    product = walsh.pointwise_product(xi_12, xi_23)
    assert np.all(product.coeffs == walsh.basis(n, [1, 3]).coeffs)

    square = walsh.pointwise_product(xi_12, xi_12)
    assert np.all(square.coeffs == walsh.unit(n).coeffs)


@testing.parametrize("n", [1, 3, 5])
def test_wick_product_matches_bruteforce(n):
    key = prng.prng_key(1)
    x = test_util.random_walsh_vector(prng.fold_in(key, 0), n)
    y = test_util.random_walsh_vector(prng.fold_in(key, 1), n)
    received = walsh.wick_product(x, y)
    expected = test_util.wick_product_bruteforce(x, y)
    assert np.allclose(received.coeffs, expected.coeffs, rtol=1e-12, atol=1e-12)


@testing.parametrize("n", [2, 4, 6])
def test_pointwise_product_multiplies_values_along_paths(n):
    key = prng.prng_key(2)
    x = test_util.random_walsh_vector(prng.fold_in(key, 0), n)
    y = test_util.random_walsh_vector(prng.fold_in(key, 1), n)
    product = walsh.pointwise_product(x, y)

    received = walsh.evaluate_all_paths(product)
    expected = walsh.evaluate_all_paths(x) * walsh.evaluate_all_paths(y)
    assert np.allclose(received, expected, rtol=1e-12, atol=1e-12)


def test_wick_product_is_commutative_associative_and_unital(n=4):
    key = prng.prng_key(3)
    x, y, z = (test_util.random_walsh_vector(prng.fold_in(key, j), n) for j in range(3))
    wick = walsh.wick_product
    assert np.allclose(wick(x, y).coeffs, wick(y, x).coeffs)
    assert np.allclose(wick(wick(x, y), z).coeffs, wick(x, wick(y, z)).coeffs)
    assert np.allclose(wick(x, walsh.unit(n)).coeffs, x.coeffs)


def test_linear_fast_paths_match_the_general_products(n=5):
    key = prng.prng_key(4)
    x = test_util.random_walsh_vector(prng.fold_in(key, 0), n)
    weights = prng.normal(prng.fold_in(key, 1), shape=(n,))
    linear = walsh.linear_vector(weights)

    received = walsh.wick_product_linear(x, weights)
    expected = walsh.wick_product(x, linear)
    assert np.allclose(received.coeffs, expected.coeffs, rtol=1e-12, atol=1e-12)

    received = walsh.pointwise_product_linear(x, weights)
    expected = walsh.pointwise_product(x, linear)
    assert np.allclose(received.coeffs, expected.coeffs, rtol=1e-12, atol=1e-12)


def test_wick_power_of_a_linear_vector_has_symmetric_coefficients():
    weights = np.asarray([0.5, -2.0, 3.0])
    power = walsh.wick_power(walsh.linear_vector(weights), 2)
    assert np.allclose(power.coeffs[walsh.mask_of([1, 2])], 2 * 0.5 * -2.0)
    assert np.allclose(power.coeffs[walsh.mask_of([2, 3])], 2 * -2.0 * 3.0)
    assert np.allclose(power.coeffs[walsh.mask_of([1])], 0.0)

    # Powers above the dimension vanish
    assert np.all(walsh.wick_power(walsh.linear_vector(weights), 4).coeffs == 0.0)


def test_wick_power_of_a_general_vector_uses_the_general_product(n=3):
    x = test_util.random_walsh_vector(prng.prng_key(5), n)
    received = walsh.wick_power(x, 2)
    expected = walsh.wick_product(x, x)
    assert np.allclose(received.coeffs, expected.coeffs)


def test_dimension_mismatch_raises():
    with testing.raises(walsh.DimensionError):
        walsh.wick_product(walsh.unit(2), walsh.unit(3))
    with testing.raises(walsh.DimensionError):
        walsh.wick_product_linear(walsh.unit(2), np.ones((3,)))


def test_capacity_caps_raise():
    with testing.raises(walsh.CapacityError):
        walsh.check_capacity(walsh.DENSE_CAP + 1)
    n = walsh.PRODUCT_CAP + 1
    with testing.raises(walsh.CapacityError, match="Wick product"):
        walsh.wick_product(walsh.unit(n), walsh.unit(n))
    n = walsh.POINTWISE_CAP + 1
    with testing.raises(walsh.CapacityError, match="pointwise"):
        walsh.pointwise_product(walsh.unit(n), walsh.unit(n))
