"""Test the U recursion, the map sums, and the substitution error."""

from wickfbm import hermite, kernel, schemes, test_util, walsh
from wickfbm.backend import np, prng, testing


@testing.fixture()
def grid():
    return test_util.random_grid(prng.prng_key(1), 5)


def test_first_polynomial_is_the_random_walk(grid):
    state = schemes.u_solve(grid, max_grade=3)
    for l in range(grid.n + 1):
        state_l = schemes.u_solve(grid, steps=l, max_grade=1)
        walk = walsh.random_walk_vector(grid, l / grid.n)
        assert np.allclose(schemes.u_dense(state_l, 1).coeffs, walk.coeffs)
    assert state.step == grid.n


@testing.parametrize("k", [0, 1, 2, 3])
@testing.parametrize("l", [2, 5])
def test_polynomials_are_injective_map_sums(grid, k, l):
    state = schemes.u_solve(grid, steps=l, max_grade=4)
    received = schemes.u_dense(state, k)
    expected = schemes.map_sum_vector(grid, l, k, kind="injective")
    assert np.allclose(received.coeffs, expected.coeffs, rtol=1e-12, atol=1e-14)


@testing.parametrize("k", [1, 2, 3])
def test_all_maps_give_the_wick_power(grid, k, l=4):
    walk = walsh.random_walk_vector(grid, l / grid.n)
    received = schemes.map_sum_vector(grid, l, k, kind="all")
    assert np.allclose(received.coeffs, walsh.wick_power(walk, k).coeffs)

    injective = schemes.map_sum_vector(grid, l, k, kind="injective")
    noninjective = schemes.map_sum_vector(grid, l, k, kind="noninjective")
    assert np.allclose(injective.coeffs + noninjective.coeffs, received.coeffs)


def test_second_polynomial_matches_the_hand_computation(grid):
    # U^2_2 at {1, 2} is 2 (d_11 d_22 + d_21 d_12); d_12 = 0 in the first row
    state = schemes.u_solve(grid, steps=2, max_grade=2)
    d = grid.d
    expected = 2 * (d[1, 0] * d[2, 1] + d[2, 0] * d[1, 1])
    received = schemes.u_dense(state, 2).coeffs[walsh.mask_of([1, 2])]
    assert np.allclose(received, expected)


def test_polynomials_vanish_above_the_step(grid):
    state = schemes.u_solve(grid, steps=2, max_grade=2)
    assert np.all(schemes.u_dense(state, 3).coeffs == 0.0)

    state = schemes.u_solve(grid, steps=4, max_grade=2)
    with testing.raises(walsh.CapacityError, match="grade cap"):
        schemes.u_dense(state, 3)


def test_grade_cap_is_clamped_to_the_dimension(grid):
    assert schemes.u_init(grid, max_grade=99).max_grade == grid.n


def test_support_cap_raises(grid):
    with testing.raises(walsh.CapacityError, match="support cap"):
        schemes.u_solve(grid, max_grade=3, support_cap=2)


def test_invalid_steps_raise(grid):
    with testing.raises(ValueError, match="steps"):
        schemes.u_solve(grid, steps=grid.n + 1)
    state = schemes.u_solve(grid)
    with testing.raises(ValueError, match="already reached"):
        schemes.u_step(state)
    with testing.raises(ValueError, match="kind"):
        schemes.map_sum_vector(grid, 2, 1, kind="surjective")


def test_substitution_error_vanishes_for_linear_functionals(grid):
    result = schemes.u_difference_norm(grid, hermite.identity_coeffs(), 1.0)
    assert result.value == 0.0


@testing.parametrize("n", [8, 10, 12])
def test_substitution_error_satisfies_its_bound(n, hurst=0.75):
    grid = kernel.build_grid(hurst, n)
    result = schemes.u_difference_norm(grid, hermite.exponential_coeffs(), 1.0)
    assert 0.0 < result.value <= result.bound
    assert np.allclose(result.bound, result.constant * n ** (1 - 2 * hurst))


def test_substitution_error_decreases_with_n(hurst=0.75):
    coeffs = hermite.exponential_coeffs()
    values = [
        schemes.u_difference_norm(kernel.build_grid(hurst, n), coeffs, 1.0).value
        for n in (6, 9, 12)
    ]
    assert values[0] > values[1] > values[2]


@testing.parametrize("hurst", [0.6, 0.75])
@testing.parametrize("n", [6, 8, 10])
@testing.parametrize("N", [1, 2, 3, 4])
def test_hermite_residual_matches_the_closed_form(N, n, hurst, t=1.0):
    grid = kernel.build_grid(hurst, n)
    result = schemes.discrete_hermite_residual(grid, t, N)
    residual, closed_form = result.residual.coeffs, result.closed_form.coeffs
    assert np.allclose(residual, closed_form, rtol=1e-9, atol=1e-13)
    assert result.norm_squared <= result.bound


def test_first_order_hermite_recursion_is_exact(n=5):
    grid = test_util.random_grid(prng.prng_key(2), n)
    result = schemes.discrete_hermite_residual(grid, 1.0, 1)
    assert np.allclose(result.residual.coeffs, 0.0, atol=1e-14)


def test_second_order_hermite_residual_is_a_sum_of_sixth_powers(n=5):
    # R = 2 sum_i b_i^3 xi_i
    grid = test_util.random_grid(prng.prng_key(3), n)
    result = schemes.discrete_hermite_residual(grid, 1.0, 2)
    row = kernel.grid_row(grid, 1.0)
    assert np.allclose(result.norm_squared, 4 * float(np.sum(row**6)))


def test_hermite_residual_of_order_zero_raises(n=3):
    grid = test_util.random_grid(prng.prng_key(4), n)
    with testing.raises(ValueError, match="N >= 1"):
        schemes.discrete_hermite_residual(grid, 1.0, 0)
