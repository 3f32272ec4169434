"""Test construction, evaluation, and storage of Walsh vectors."""

from wickfbm import kernel, test_util, walsh
from wickfbm.backend import func, np, prng, testing


def test_masks_are_one_based():
    assert walsh.mask_of([1, 3]) == 0b101
    with testing.raises(ValueError, match="one-based"):
        walsh.mask_of([0])
    with testing.raises(ValueError, match="exceed"):
        walsh.basis(2, [3])


def test_grade_of_masks_counts_bits():
    grades = walsh.grade_of_masks(3)
    assert grades.tolist() == [0, 1, 1, 2, 1, 2, 2, 3]


def test_evaluate_basis_element():
    x = walsh.basis(3, [1, 3])
    signs = np.asarray([-1.0, 1.0, -1.0])
    assert walsh.evaluate(x, signs) == 1.0
    signs = np.asarray([-1.0, 1.0, 1.0])
    assert walsh.evaluate(x, signs) == -1.0


def test_all_paths_enumerates_the_cube(n=3):
    paths = walsh.all_paths(n)
    assert np.shape(paths) == (2**n, n)
    assert np.all(paths[0] == 1.0)
    assert np.all(paths[-1] == -1.0)
    assert len({tuple(p) for p in paths.tolist()}) == 2**n


def test_characters_are_orthonormal(n=4):
    chars = func.vmap(walsh.characters)(walsh.all_paths(n))
    gram = chars.T @ chars / 2**n
    assert np.allclose(gram, np.eye(2**n))


def test_walsh_transform_inverts_evaluation(n=4):
    x = test_util.random_walsh_vector(prng.prng_key(1), n)
    received = test_util.walsh_transform(walsh.evaluate_all_paths(x))
    test_util.assert_allclose(received.coeffs, x.coeffs)


def test_expectation_and_norm(n=3):
    x = test_util.random_walsh_vector(prng.prng_key(2), n)
    values = walsh.evaluate_all_paths(x)
    assert np.allclose(walsh.expectation(x), np.mean(values))
    assert np.allclose(walsh.norm_squared(x), np.mean(values**2))


def test_random_walk_vector_is_linear(n=5):
    grid = kernel.build_grid(0.75, n)
    walk = walsh.random_walk_vector(grid, 0.6)
    singletons = np.left_shift(1, np.arange(n))
    assert np.allclose(walk.coeffs[singletons], grid.b[3])
    variance = kernel.discrete_covariance(grid, 0.6, 0.6)
    assert np.allclose(walsh.norm_squared(walk), variance)


def test_dump_round_trip_is_exact(n=3):
    x = test_util.random_walsh_vector(prng.prng_key(3), n)
    text = walsh.dump(x)
    assert text.splitlines()[1].startswith("001\t")
    parsed = walsh.parse_dump(text)
    assert parsed.n == n
    assert np.all(parsed.coeffs == x.coeffs)


def test_parse_empty_dump_raises():
    with testing.raises(ValueError, match="empty"):
        walsh.parse_dump("\n")


def test_graded_storage_round_trip(n=4):
    x = walsh.wick_power(walsh.linear_vector(np.arange(1.0, n + 1.0)), 2)
    graded = walsh.from_dense(x, 2)
    assert walsh.support_size(graded) == 6
    assert set(graded.grades[2]) == {m for m in range(2**n) if bin(m).count("1") == 2}
    assert np.all(walsh.to_dense(graded).coeffs == x.coeffs)


def test_graded_storage_rejects_lossy_conversion(n=3):
    x = walsh.basis(n, [1, 2, 3])
    with testing.raises(ValueError, match="above grade"):
        walsh.from_dense(x, 2)


def test_graded_unit(n=3, max_grade=2):
    unit = walsh.graded_unit(n, max_grade)
    assert np.all(walsh.to_dense(unit).coeffs == walsh.unit(n).coeffs)
    assert walsh.support_size(walsh.graded_zeros(n, max_grade)) == 0
