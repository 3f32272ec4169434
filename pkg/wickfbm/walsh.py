r"""Exact discrete Wiener chaos algebra on $\{-1, +1\}^n$.

A random variable $X = f(\xi_1, ..., \xi_n)$ of $n$ independent symmetric
Bernoulli variables has the unique Walsh decomposition

$$
X = \sum_{A \subseteq \{1, ..., n\}} x_A \Xi_A,
\quad \Xi_A = \prod_{i \in A} \xi_i.
$$

Subsets are encoded as bitmasks: bit ``i - 1`` is set if and only if
index ``i`` belongs to the subset. The coefficient $x_A$ is stored at
position ``mask(A)`` of a dense array of length $2^n$.

The discrete Wick product multiplies basis elements with disjoint index sets
and annihilates overlapping ones, $\Xi_A \diamond \Xi_B = \Xi_{A \cup B}$ if
$A \cap B = \emptyset$ and zero otherwise.
The ordinary (pointwise) product satisfies $\Xi_A \Xi_B = \Xi_{A \Delta B}$.
"""

from wickfbm import kernel
from wickfbm.backend import containers, func, np
from wickfbm.backend.typing import Array, Sequence

# Dense vectors store 2^n coefficients
DENSE_CAP = 24

# The general Wick product touches 3^n pairs of subsets
PRODUCT_CAP = 14

# The general pointwise product materialises a 2^n x 2^n gather table
POINTWISE_CAP = 12


class DimensionError(ValueError):
    """Operands live on different numbers of Bernoulli variables."""


class CapacityError(RuntimeError):
    """An operation exceeds the capacity of the exact engines."""


class WalshVector(containers.NamedTuple):
    """Dense Walsh decomposition with coefficients indexed by bitmask."""

    n: int
    coeffs: Array


class GradedWalshVector(containers.NamedTuple):
    """Sparse Walsh decomposition, stored grade by grade.

    ``grades[k]`` maps bitmasks with exactly ``k`` set bits to coefficients.
    """

    n: int
    max_grade: int
    grades: tuple


def check_capacity(n: int, /, cap: int = DENSE_CAP, *, what: str = "dense") -> None:
    """Raise a CapacityError if ``n`` exceeds the given cap."""
    if n > cap:
        msg = f"The {what} engine supports n <= {cap}; received n={n}."
        raise CapacityError(msg)


def zeros(n: int, /) -> WalshVector:
    """Construct the zero vector."""
    check_capacity(n)
    return WalshVector(n, np.zeros((2**n,)))


def unit(n: int, /) -> WalshVector:
    """Construct the unit of both products, the indicator of the empty set."""
    x = zeros(n)
    return WalshVector(n, x.coeffs.at[0].set(1.0))


def mask_of(indices: Sequence[int], /) -> int:
    """Encode a set of (one-based) indices as a bitmask."""
    mask = 0
    for i in indices:
        if i < 1:
            msg = f"Indices are one-based; received {i}."
            raise ValueError(msg)
        mask |= 1 << (i - 1)
    return mask


def basis(n: int, indices: Sequence[int], /) -> WalshVector:
    r"""Construct the basis element $\Xi_A$ for the index set $A$."""
    mask = mask_of(indices)
    if mask >= 2**n:
        msg = f"Indices {sorted(indices)} exceed n={n}."
        raise ValueError(msg)
    x = zeros(n)
    return WalshVector(n, x.coeffs.at[mask].set(1.0))


def from_coeffs(coeffs: Array, /) -> WalshVector:
    """Wrap a coefficient array of length 2^n."""
    coeffs = np.asarray(coeffs, dtype=float)
    (size,) = np.shape(coeffs)
    n = size.bit_length() - 1
    if size != 2**n:
        msg = f"The number of coefficients must be a power of two; received {size}."
        raise ValueError(msg)
    check_capacity(n)
    return WalshVector(n, coeffs)


def linear_vector(weights: Array, /) -> WalshVector:
    r"""Construct the grade-one vector $\sum_i w_i \xi_i$."""
    weights = np.asarray(weights, dtype=float)
    (n,) = np.shape(weights)
    x = zeros(n)
    singletons = np.left_shift(1, np.arange(n))
    return WalshVector(n, x.coeffs.at[singletons].set(weights))


def random_walk_vector(grid: kernel.KernelGrid, t: float, /) -> WalshVector:
    r"""Walsh decomposition of the binary random walk $B^{H,n}_t$.

    The result has coefficient $b^n_{t,i}$ at the singleton $\{i\}$
    and no other mass.
    """
    check_capacity(grid.n)
    return linear_vector(kernel.grid_row(grid, t))


@func.cache
def grade_of_masks(n: int, /) -> Array:
    """Compute the number of set bits of every mask below 2^n."""
    grades = np.zeros((1,), dtype=int)
    for _ in range(n):
        grades = np.concatenate([grades, grades + 1])
    return grades


def linear_combination(scalars: Sequence[float], vectors: Sequence[WalshVector], /):
    """Compute the linear combination of several vectors."""
    n = _common_dimension(*vectors)
    coeffs = sum(a * x.coeffs for a, x in zip(scalars, vectors))
    return WalshVector(n, coeffs)


def _common_dimension(*vectors):
    dims = {x.n for x in vectors}
    if len(dims) != 1:
        msg = f"Dimension mismatch: received vectors with n in {sorted(dims)}."
        raise DimensionError(msg)
    return dims.pop()


@func.cache
def _submask_pairs(n):
    # Every pair A subset of C is a ternary choice per index:
    # outside C, inside A, or inside C but not A
    supersets = np.zeros((1,), dtype=int)
    subsets = np.zeros((1,), dtype=int)
    for bit in range(n):
        flag = 1 << bit
        supersets = np.concatenate(
            [supersets, np.bitwise_or(supersets, flag), np.bitwise_or(supersets, flag)]
        )
        subsets = np.concatenate([subsets, np.bitwise_or(subsets, flag), subsets])
    return supersets, subsets


def wick_product(x: WalshVector, y: WalshVector, /) -> WalshVector:
    r"""Compute the discrete Wick product $X \diamond_n Y$.

    The coefficients are the disjoint-union convolution
    $(x \diamond y)_C = \sum_{A \subseteq C} x_A y_{C \setminus A}$,
    evaluated by enumerating all $3^n$ pairs of nested subsets.
    """
    n = _common_dimension(x, y)
    check_capacity(n, PRODUCT_CAP, what="Wick product")
    supersets, subsets = _submask_pairs(n)
    complements = np.bitwise_xor(supersets, subsets)
    summands = x.coeffs[subsets] * y.coeffs[complements]
    return WalshVector(n, np.zeros((2**n,)).at[supersets].add(summands))


def wick_product_linear(x: WalshVector, weights: Array, /) -> WalshVector:
    r"""Compute $X \diamond_n \sum_i w_i \xi_i$ in $O(n 2^n)$ operations.

    Uses $(X \diamond \sum_i w_i \xi_i)_C = \sum_{i \in C} w_i x_{C \setminus \{i\}}$.
    """
    weights = np.asarray(weights, dtype=float)
    if np.shape(weights) != (x.n,):
        msg = f"Expected {x.n} weights; received shape {np.shape(weights)}."
        raise DimensionError(msg)
    masks = np.arange(2**x.n)
    result = np.zeros_like(x.coeffs)
    for i in range(x.n):
        bit = 1 << i
        inside = np.bitwise_and(masks, bit) != 0
        shifted = x.coeffs[np.bitwise_xor(masks, bit)]
        result += np.where(inside, weights[i] * shifted, 0.0)
    return WalshVector(x.n, result)


def pointwise_product(x: WalshVector, y: WalshVector, /) -> WalshVector:
    r"""Compute the ordinary product $XY$ of two random variables.

    Uses $\Xi_A \Xi_B = \Xi_{A \Delta B}$, that is,
    $(xy)_C = \sum_A x_A y_{A \Delta C}$.
    """
    n = _common_dimension(x, y)
    check_capacity(n, POINTWISE_CAP, what="pointwise product")
    masks = np.arange(2**n)
    table = np.bitwise_xor(masks[:, None], masks[None, :])
    return WalshVector(n, y.coeffs[table] @ x.coeffs)


def pointwise_product_linear(x: WalshVector, weights: Array, /) -> WalshVector:
    r"""Compute $X \cdot \sum_i w_i \xi_i$ in $O(n 2^n)$ operations."""
    weights = np.asarray(weights, dtype=float)
    if np.shape(weights) != (x.n,):
        msg = f"Expected {x.n} weights; received shape {np.shape(weights)}."
        raise DimensionError(msg)
    masks = np.arange(2**x.n)
    result = np.zeros_like(x.coeffs)
    for i in range(x.n):
        result += weights[i] * x.coeffs[np.bitwise_xor(masks, 1 << i)]
    return WalshVector(x.n, result)


def wick_power(x: WalshVector, k: int, /) -> WalshVector:
    """Compute the k-fold Wick product of a vector with itself.

    Grade-one vectors take the linear fast path, which has no product cap.
    """
    if k < 0:
        msg = f"Wick powers need a nonnegative exponent; received k={k}."
        raise ValueError(msg)
    weights = _linear_weights(x)
    result = unit(x.n)
    for _ in range(k):
        if weights is not None:
            result = wick_product_linear(result, weights)
        else:
            result = wick_product(result, x)
    return result


def _linear_weights(x):
    singletons = np.left_shift(1, np.arange(x.n))
    grade_one = grade_of_masks(x.n) == 1
    if bool(np.any(np.where(grade_one, 0.0, x.coeffs) != 0)):
        return None
    return x.coeffs[singletons]


def inner_product(x: WalshVector, y: WalshVector, /) -> float:
    r"""Compute $\mathbb{E}[XY] = \sum_A x_A y_A$."""
    _common_dimension(x, y)
    return float(x.coeffs @ y.coeffs)


def norm_squared(x: WalshVector, /) -> float:
    r"""Compute $\mathbb{E}[X^2]$."""
    return inner_product(x, x)


def expectation(x: WalshVector, /) -> float:
    """Return the coefficient of the empty set."""
    return float(x.coeffs[0])


def characters(signs: Array, /) -> Array:
    r"""Evaluate all basis elements $\Xi_A$ at one path.

    Entry ``mask`` of the result is $\prod_{i \in A} \xi_i$.
    Works under ``vmap``.
    """
    chars = np.ones((1,), dtype=signs.dtype)
    for i in range(np.shape(signs)[0]):
        chars = np.concatenate([chars, chars * signs[i]])
    return chars


def evaluate(x: WalshVector, signs: Array, /) -> float:
    """Evaluate a random variable at one path of signs."""
    signs = np.asarray(signs, dtype=float)
    if np.shape(signs) != (x.n,):
        msg = f"Expected a path of length {x.n}; received shape {np.shape(signs)}."
        raise DimensionError(msg)
    return float(characters(signs) @ x.coeffs)


def all_paths(n: int, /) -> Array:
    """Enumerate all 2^n sign paths; row ``p`` flips index i+1 if bit i of p is set."""
    check_capacity(n, 16, what="exhaustive")
    masks = np.arange(2**n)[:, None]
    bits = np.left_shift(1, np.arange(n))[None, :]
    return np.where(np.bitwise_and(masks, bits) != 0, -1.0, 1.0)


def evaluate_all_paths(x: WalshVector, /) -> Array:
    """Evaluate a random variable at every path, in the order of all_paths."""
    paths = all_paths(x.n)
    return func.vmap(characters)(paths) @ x.coeffs


def dump(x: WalshVector, /) -> str:
    """Render a vector as lines ``mask_bits<TAB>coefficient``, sorted by mask.

    The leftmost bit is index ``n``, the rightmost is index 1.
    Coefficients are printed with ``repr`` so that parsing is exact.
    """
    values = x.coeffs.tolist()
    lines = [f"{mask:0{x.n}b}\t{value!r}" for mask, value in enumerate(values)]
    return "\n".join(lines) + "\n"


def parse_dump(text: str, /) -> WalshVector:
    """Parse the output of [dump][wickfbm.walsh.dump]."""
    entries = {}
    width = None
    for line in text.splitlines():
        if not line.strip():
            continue
        bits, value = line.split("\t")
        width = len(bits)
        entries[int(bits, 2)] = float(value)
    if width is None:
        msg = "Cannot parse an empty dump."
        raise ValueError(msg)
    coeffs = np.zeros((2**width,))
    masks = np.asarray(list(entries.keys()))
    coeffs = coeffs.at[masks].set(np.asarray(list(entries.values())))
    return WalshVector(width, coeffs)


def graded_zeros(n: int, max_grade: int, /) -> GradedWalshVector:
    """Construct the zero vector in graded storage."""
    if max_grade < 0:
        msg = f"The grade cap must be nonnegative; received {max_grade}."
        raise ValueError(msg)
    return GradedWalshVector(n, max_grade, tuple({} for _ in range(max_grade + 1)))


def graded_unit(n: int, max_grade: int, /) -> GradedWalshVector:
    """Construct the unit in graded storage."""
    zero = graded_zeros(n, max_grade)
    return GradedWalshVector(n, max_grade, ({0: 1.0}, *zero.grades[1:]))


def support_size(x: GradedWalshVector, /) -> int:
    """Count the stored coefficients."""
    return sum(len(grade) for grade in x.grades)


def to_dense(x: GradedWalshVector, /) -> WalshVector:
    """Convert graded storage into a dense vector."""
    result = zeros(x.n)
    masks = [mask for grade in x.grades for mask in grade]
    if not masks:
        return result
    values = [value for grade in x.grades for value in grade.values()]
    coeffs = result.coeffs.at[np.asarray(masks)].set(np.asarray(values))
    return WalshVector(x.n, coeffs)


def from_dense(x: WalshVector, max_grade: int, /) -> GradedWalshVector:
    """Convert a dense vector into graded storage.

    Raises a ValueError if the vector has mass above ``max_grade``,
    because the conversion would not be lossless.
    """
    grades = grade_of_masks(x.n)
    if bool(np.any(np.where(grades > max_grade, x.coeffs, 0.0) != 0)):
        msg = f"The vector has Walsh mass above grade {max_grade}."
        raise ValueError(msg)

    result = graded_zeros(x.n, max_grade)
    (support,) = np.nonzero(x.coeffs)
    values = x.coeffs[support].tolist()
    for mask, value in zip(support.tolist(), values):
        result.grades[bin(mask).count("1")][mask] = value
    return result
