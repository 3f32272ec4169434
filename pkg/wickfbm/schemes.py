r"""Wick difference equations driven by the disturbed binary random walk.

All schemes advance on the lattice $l = 0, ..., n$ with increments
$\Delta B_l = B^{H,n}_{l/n} - B^{H,n}_{(l-1)/n} = \sum_i d_{l,i} \xi_i$:

* geometric: $S_l = S_{l-1} + S_{l-1} \diamond_n \Delta B_l$, $S_0 = 1$;
* drift: $S_l = (1 + \mu/n) S_{l-1} + \sigma S_{l-1} \diamond_n \Delta B_l$,
  $S_0 = s_0$;
* linear system:
  $X_l = X_{l-1} + (A_1 X_{l-1} + A_2 Y_{l-1}) \diamond_n \Delta B_l$ and
  $Y_l = Y_{l-1} + (B_1 X_{l-1} + B_2 Y_{l-1}) \diamond_n \Delta B_l$;
* sine/cosine: the linear system with $A_2 = 1$, $B_1 = -1$, $x_0 = 0$, $y_0 = 1$;
* pathwise: $\hat X_l = \hat X_{l-1} (1 + \Delta B_l)$ with the ordinary product.

Every Wick scheme is solved by $\sum_k \frac{a_k}{k!} U^k_l$ with the
polynomials of the recursion
$U^k_l = U^k_{l-1} + k U^{k-1}_{l-1} \diamond_n \Delta B_l$.
"""

import itertools
import logging
import math

from wickfbm import bounds, hermite, kernel, symfun, walsh
from wickfbm.backend import containers, control_flow, np
from wickfbm.backend.typing import Array, Iterator, Optional, Tuple

logger = logging.getLogger(__name__)

# Largest number of stored coefficients of a single U^k
SUPPORT_CAP = 2**22

VARIANTS = ("geometric", "drift", "linear_system", "sin_cos", "pathwise_sottinen")


class SchemeSpec(containers.NamedTuple):
    """Parameters of a difference scheme.

    Only the fields of the respective variant are meaningful.
    """

    variant: str
    mu: float = 0.0
    sigma: float = 1.0
    s0: float = 1.0
    a1: float = 0.0
    a2: float = 0.0
    b1: float = 0.0
    b2: float = 0.0
    x0: float = 1.0
    y0: float = 0.0


def geometric() -> SchemeSpec:
    """Wick-geometric scheme, the discrete Wick exponential."""
    return SchemeSpec("geometric")


def drift(mu: float, sigma: float, s0: float = 1.0) -> SchemeSpec:
    """Linear scheme with drift ``mu`` and volatility ``sigma > 0``."""
    if not sigma > 0:
        msg = f"The volatility must be positive; received sigma={sigma}."
        raise ValueError(msg)
    return SchemeSpec("drift", mu=float(mu), sigma=float(sigma), s0=float(s0))


def linear_system(a1, a2, b1, b2, x0, y0) -> SchemeSpec:
    """Two-dimensional linear Wick system."""
    params = (a1, a2, b1, b2, x0, y0)
    a1, a2, b1, b2, x0, y0 = (float(p) for p in params)
    return SchemeSpec("linear_system", a1=a1, a2=a2, b1=b1, b2=b2, x0=x0, y0=y0)


def sin_cos() -> SchemeSpec:
    """Linear system whose components are Wick sine and Wick cosine."""
    return SchemeSpec("sin_cos", a2=1.0, b1=-1.0, x0=0.0, y0=1.0)


def pathwise_sottinen() -> SchemeSpec:
    """Product scheme with ordinary multiplication."""
    return SchemeSpec("pathwise_sottinen")


def scheme_from_name(name: str, /, **params) -> SchemeSpec:
    """Construct a scheme from its variant name and (relevant) parameters.

    Parameters that the variant does not use are ignored.
    """
    if name == "geometric":
        return geometric()
    if name == "drift":
        keys = ("mu", "sigma", "s0")
        return drift(**{k: params[k] for k in keys if k in params})
    if name == "linear_system":
        keys = ("a1", "a2", "b1", "b2", "x0", "y0")
        missing = [k for k in keys if k not in params]
        if missing:
            msg = f"The linear system needs the parameters {missing}."
            raise ValueError(msg)
        return linear_system(*(params[k] for k in keys))
    if name == "sin_cos":
        return sin_cos()
    if name == "pathwise_sottinen":
        return pathwise_sottinen()
    msg = f"Unknown scheme '{name}'; expected one of {VARIANTS}."
    raise ValueError(msg)


def components(spec: SchemeSpec, /) -> Tuple[str, ...]:
    """Names of the solution components."""
    if spec.variant in ("linear_system", "sin_cos"):
        return ("x", "y")
    return ("s",)


def linear_system_coefficients(spec: SchemeSpec, order: int, /):
    r"""Compute $a_k = A_1 a_{k-1} + A_2 b_{k-1}$, $b_k = B_1 a_{k-1} + B_2 b_{k-1}$.

    Starts at $(a_0, b_0) = (x_0, y_0)$ and returns both sequences up to ``order``.
    """
    matrix = np.asarray([[spec.a1, spec.a2], [spec.b1, spec.b2]])

    def step(ab, _):
        ab = matrix @ ab
        return ab, ab

    init = np.asarray([spec.x0, spec.y0])
    _, rest = control_flow.scan(step, init, xs=None, length=order)
    table = np.concatenate([init[None, :], rest])
    return table[:, 0], table[:, 1]


def scheme_coefficients(
    spec: SchemeSpec, n: int, /
) -> Tuple[hermite.SeriesCoeffs, ...]:
    """Series coefficients of every component of the scheme on ``n`` steps.

    The pathwise scheme is no Wick functional; its coefficients
    carry no growth certificate.
    """
    if spec.variant == "geometric":
        return (hermite.exponential_coeffs(1.0),)
    if spec.variant == "drift":
        return (hermite.exponential_coeffs(drift_volatility(spec, n)),)
    if spec.variant in ("linear_system", "sin_cos"):
        return _linear_system_series(spec)
    return (hermite.SeriesCoeffs(_no_terms, growth=None, label=spec.variant),)


def _linear_system_series(spec):
    m_ab = 2 * max(abs(spec.a1), abs(spec.a2), abs(spec.b1), abs(spec.b2))
    scale = max(abs(spec.x0), abs(spec.y0))

    def terms_a(order):
        return linear_system_coefficients(spec, order)[0]

    def terms_b(order):
        return linear_system_coefficients(spec, order)[1]

    return (
        hermite.SeriesCoeffs(terms_a, growth=m_ab, label="x", scale=scale),
        hermite.SeriesCoeffs(terms_b, growth=m_ab, label="y", scale=scale),
    )


def _no_terms(order):
    msg = "The pathwise scheme has no series coefficients."
    raise hermite.CertificateError(msg)


def drift_volatility(spec: SchemeSpec, n: int, /) -> float:
    r"""Volatility $\sigma / (1 + \mu/n)$ of the geometric factor of the drift scheme.

    Raises
    ------
    ValueError
        If $1 + \mu/n = 0$; the scheme then has no geometric factor.
    """
    rate = 1 + spec.mu / n
    if rate == 0:
        msg = f"The drift scheme needs 1 + mu/n != 0; received mu={spec.mu}, n={n}."
        raise ValueError(msg)
    return spec.sigma / rate


def scheme_prefactor(spec: SchemeSpec, n: int, l: int, /) -> float:
    r"""Deterministic factor of the solution at step ``l``.

    For the drift scheme this is $W_l = (1 + \mu/n)^l s_0$, otherwise one.
    """
    if spec.variant == "drift":
        return (1 + spec.mu / n) ** l * spec.s0
    return 1.0


class URecursionState(containers.NamedTuple):
    """State of the U recursion after ``step`` steps.

    ``u[k]`` holds $U^k_{step}$, which lives on grade-``k`` subsets only.
    """

    grid: kernel.KernelGrid
    max_grade: int
    u: tuple
    step: int


def u_init(grid: kernel.KernelGrid, /, max_grade: int = 8) -> URecursionState:
    r"""Initialise the U recursion with $U^0 = 1$ and $U^k = 0$ for $k \ge 1$."""
    if max_grade < 0:
        msg = f"The grade cap must be nonnegative; received max_grade={max_grade}."
        raise ValueError(msg)
    walsh.check_capacity(grid.n, what="U recursion")
    max_grade = min(max_grade, grid.n)
    unit = walsh.graded_unit(grid.n, max_grade)
    zeros = [walsh.graded_zeros(grid.n, max_grade) for _ in range(max_grade)]
    return URecursionState(grid, max_grade, (unit, *zeros), step=0)


def u_step(
    state: URecursionState, /, *, support_cap: int = SUPPORT_CAP
) -> URecursionState:
    r"""Advance all $U^k$ by one step.

    Multiplying $U^{k-1}$ by $\Delta B_l$ moves every coefficient at a
    subset $A$ to $A \cup \{i\}$ for $i \notin A$, weighted by $d_{l,i}$.

    Raises
    ------
    CapacityError
        If a grade would store more than ``support_cap`` coefficients.
    """
    grid = state.grid
    l = state.step + 1
    if l > grid.n:
        msg = f"The recursion has already reached step n={grid.n}."
        raise ValueError(msg)
    increments = [float(v) for v in grid.d[l, :l]]

    updated = [state.u[0]]
    for k in range(1, state.max_grade + 1):
        coeffs = dict(state.u[k].grades[k])
        for mask, value in state.u[k - 1].grades[k - 1].items():
            for i, weight in enumerate(increments):
                bit = 1 << i
                if mask & bit:
                    continue
                target = mask | bit
                coeffs[target] = coeffs.get(target, 0.0) + k * value * weight
        if len(coeffs) > support_cap:
            msg = (
                f"U^{k} at step {l} needs {len(coeffs)} coefficients; "
                f"the support cap is {support_cap}."
            )
            raise walsh.CapacityError(msg)
        grades = tuple(coeffs if j == k else {} for j in range(state.max_grade + 1))
        updated.append(walsh.GradedWalshVector(grid.n, state.max_grade, grades))
    return URecursionState(grid, state.max_grade, tuple(updated), step=l)


def u_solve(
    grid: kernel.KernelGrid,
    /,
    steps: Optional[int] = None,
    max_grade: int = 8,
    *,
    support_cap: int = SUPPORT_CAP,
) -> URecursionState:
    """Run the U recursion for ``steps`` steps (default: all ``n``)."""
    steps = grid.n if steps is None else steps
    if not 0 <= steps <= grid.n:
        msg = f"Expected 0 <= steps <= {grid.n}; received steps={steps}."
        raise ValueError(msg)
    state = u_init(grid, max_grade=max_grade)
    for _ in range(steps):
        state = u_step(state, support_cap=support_cap)
    logger.debug("U recursion: %d steps, grade cap %d", steps, state.max_grade)
    return state


def u_dense(state: URecursionState, k: int, /) -> walsh.WalshVector:
    """Return $U^k$ as a dense vector (zero above the grade cap is not allowed)."""
    if k > state.max_grade:
        if k > state.step:
            return walsh.zeros(state.grid.n)
        msg = f"U^{k} exceeds the grade cap {state.max_grade}."
        raise walsh.CapacityError(msg)
    return walsh.to_dense(state.u[k])


class UDifference(containers.NamedTuple):
    """Mean-square distance of the two discrete approximations and its bound."""

    value: float
    bound: float
    constant: float


def u_difference_norm(
    grid: kernel.KernelGrid, coeffs: hermite.SeriesCoeffs, t: float, /
) -> UDifference:
    r"""Compute $\mathbb{E}|\sum_k \frac{a_k}{k!} ((B_t)^{\diamond k} - U^k_t)|^2$.

    Chaos components of different grades are orthogonal, so the value is
    $\sum_k (a_k / k!)^2 \| (B_t)^{\diamond k} - U^k_t \|^2$.
    The bound is $K n^{1-2H}$ with $K$ evaluated at $t = 1$.
    """
    l = kernel.lattice_index(grid.n, t)
    a = hermite.coefficients(coeffs, l)
    state = u_solve(grid, steps=l, max_grade=l)
    walk = walsh.random_walk_vector(grid, t)

    value = 0.0
    for k in range(2, l + 1):
        power = walsh.wick_power(walk, k)
        diff = walsh.linear_combination([1.0, -1.0], [power, u_dense(state, k)])
        weight = float(a[k]) / math.factorial(k)
        value += weight**2 * walsh.norm_squared(diff)

    constant = bounds.u_difference_constant(
        coeffs.growth, grid.hurst, scale=coeffs.scale
    )
    bound = constant * grid.n ** (1 - 2 * grid.hurst)
    return UDifference(value, bound=bound, constant=constant)


class HermiteResidual(containers.NamedTuple):
    """Remainder of the discrete Hermite recursion."""

    residual: walsh.WalshVector
    closed_form: walsh.WalshVector
    norm_squared: float
    bound: float


def discrete_hermite_residual(
    grid: kernel.KernelGrid, t: float, N: int, /
) -> HermiteResidual:
    r"""Compute the remainder of the discrete Hermite recursion.

    $$
    R = B^{\diamond (N+1)} - \left[B \cdot B^{\diamond N}
        - N \mathbb{E}[B^2] B^{\diamond (N-1)}\right]
      = N! \sum_{|C| = N-1} b_C \Xi_C \sum_{i \in C} b_i^2,
    $$

    where $B = B^{H,n}_t$ and the middle product is the ordinary product.
    Returns both sides and the bound $16 c_H^4 N! N^3 n^{-(4-4H)}$.
    """
    if N < 1:
        msg = f"The recursion needs N >= 1; received N={N}."
        raise ValueError(msg)
    walk = walsh.random_walk_vector(grid, t)
    variance = walsh.norm_squared(walk)
    power = walsh.wick_power(walk, N)
    product = walsh.pointwise_product(walk, power)
    residual = walsh.linear_combination(
        [1.0, -1.0, N * variance],
        [walsh.wick_power(walk, N + 1), product, walsh.wick_power(walk, N - 1)],
    )
    closed_form = _hermite_remainder(kernel.grid_row(grid, t), N)
    bound = bounds.hermite_residual_bound(grid.hurst, grid.n, N)
    return HermiteResidual(
        residual, closed_form, walsh.norm_squared(residual), bound=bound
    )


def _hermite_remainder(row, N):
    n = np.shape(row)[0]
    masks = np.arange(2**n)[:, None]
    inside = np.bitwise_and(masks, np.left_shift(1, np.arange(n))[None, :]) != 0
    products = np.prod(np.where(inside, row[None, :], 1.0), axis=1)
    squares = np.sum(np.where(inside, row[None, :] ** 2, 0.0), axis=1)
    grade = walsh.grade_of_masks(n) == N - 1
    coeffs = np.where(grade, math.factorial(N) * products * squares, 0.0)
    return walsh.WalshVector(n, coeffs)


def iterate_scheme_exact(
    grid: kernel.KernelGrid, spec: SchemeSpec, /
) -> Iterator[Tuple[walsh.WalshVector, ...]]:
    """Yield the exact Walsh solution at steps 0, 1, ..., n.

    Each item is a tuple with one vector per component.
    The pathwise scheme is realised with ordinary products.
    """
    n = grid.n
    walsh.check_capacity(n, what="scheme")
    unit = walsh.unit(n)
    if spec.variant in ("linear_system", "sin_cos"):
        state = (_scaled(spec.x0, unit), _scaled(spec.y0, unit))
    elif spec.variant == "drift":
        state = (_scaled(spec.s0, unit),)
    else:
        state = (unit,)
    yield state

    for l in range(1, n + 1):
        d = grid.d[l]
        if spec.variant == "geometric":
            (s,) = state
            state = (_add(s, walsh.wick_product_linear(s, d)),)
        elif spec.variant == "drift":
            (s,) = state
            noise = walsh.wick_product_linear(s, d)
            scalars = [1 + spec.mu / n, spec.sigma]
            state = (walsh.linear_combination(scalars, [s, noise]),)
        elif spec.variant == "pathwise_sottinen":
            (s,) = state
            state = (_add(s, walsh.pointwise_product_linear(s, d)),)
        else:
            x, y = state
            dx = walsh.linear_combination([spec.a1, spec.a2], [x, y])
            dy = walsh.linear_combination([spec.b1, spec.b2], [x, y])
            state = (
                _add(x, walsh.wick_product_linear(dx, d)),
                _add(y, walsh.wick_product_linear(dy, d)),
            )
        yield state


def solve_scheme_exact(grid: kernel.KernelGrid, spec: SchemeSpec, /) -> list:
    """Collect [iterate_scheme_exact][wickfbm.schemes.iterate_scheme_exact]."""
    return list(iterate_scheme_exact(grid, spec))


def _scaled(a, x):
    return walsh.linear_combination([a], [x])


def _add(x, y):
    return walsh.linear_combination([1.0, 1.0], [x, y])


def series_solution_exact(grid: kernel.KernelGrid, spec: SchemeSpec, /) -> list:
    r"""Assemble $W_l \sum_k \frac{a_k}{k!} U^k_l$ at every step from the U recursion.

    Agrees with [solve_scheme_exact][wickfbm.schemes.solve_scheme_exact]
    for every Wick scheme; the pathwise scheme has no such representation.
    """
    n = grid.n
    coeff_arrays = [hermite.coefficients(c, n) for c in scheme_coefficients(spec, n)]
    weights = [
        [float(a[k]) / math.factorial(k) for k in range(n + 1)] for a in coeff_arrays
    ]

    state = u_init(grid, max_grade=n)
    solutions = []
    for l in range(n + 1):
        if l > 0:
            state = u_step(state)
        dense = [u_dense(state, k) for k in range(l + 1)]
        prefactor = scheme_prefactor(spec, n, l)
        solutions.append(
            tuple(
                walsh.linear_combination([prefactor * w for w in ws[: l + 1]], dense)
                for ws in weights
            )
        )
    return solutions


def drift_factors(grid: kernel.KernelGrid, spec: SchemeSpec, /) -> list:
    r"""Split the drift scheme into $(V_l, W_l)$ with $S_l = W_l V_l$.

    $V$ is the geometric scheme with volatility $\sigma / (1 + \mu/n)$ and
    $W_l = (1 + \mu/n)^l s_0$ is deterministic.
    """
    if spec.variant != "drift":
        msg = f"Expected the drift scheme; received '{spec.variant}'."
        raise ValueError(msg)
    n = grid.n
    sigma_n = drift_volatility(spec, n)
    v = walsh.unit(n)
    factors = [(v, scheme_prefactor(spec, n, 0))]
    for l in range(1, n + 1):
        v = walsh.linear_combination(
            [1.0, sigma_n], [v, walsh.wick_product_linear(v, grid.d[l])]
        )
        factors.append((v, scheme_prefactor(spec, n, l)))
    return factors


def sottinen_pathwise(grid: kernel.KernelGrid, signs: Array, /) -> Array:
    r"""Evaluate $\hat X_l = \prod_{j \le l} (1 + \Delta B_j)$ along a path.

    Returns the values at all steps $l = 0, ..., n$.
    """
    signs = np.asarray(signs, dtype=float)
    if np.shape(signs) != (grid.n,):
        msg = f"Expected a path of length {grid.n}; received shape {np.shape(signs)}."
        raise ValueError(msg)
    # Row zero of d vanishes, so the product starts at one
    return np.cumprod(1 + grid.d @ signs)


def scheme_series_path(
    grid: kernel.KernelGrid,
    spec: SchemeSpec,
    t: float,
    signs: Array,
    /,
    order: Optional[int] = None,
) -> Tuple[float, ...]:
    r"""Evaluate the scheme at time ``t`` with Wick powers in place of $U^k$.

    The substitution changes the mean-square value by at most
    $K n^{1-2H}$, see [u_difference_norm][wickfbm.schemes.u_difference_norm].
    Returns one value per component.
    """
    prefactor = scheme_prefactor(spec, grid.n, kernel.lattice_index(grid.n, t))
    return tuple(
        prefactor * symfun.wick_series_path(grid, t, c, signs, order)
        for c in scheme_coefficients(spec, grid.n)
    )


def scheme_series_paths(
    grid: kernel.KernelGrid,
    spec: SchemeSpec,
    t: float,
    signs: Array,
    /,
    order: Optional[int] = None,
) -> Tuple[Array, ...]:
    """Evaluate the scheme for a batch of paths; the pathwise scheme is exact."""
    l = kernel.lattice_index(grid.n, t)
    if spec.variant == "pathwise_sottinen":
        increments = np.asarray(signs, dtype=float) @ grid.d[: l + 1].T
        return (np.prod(1 + increments, axis=-1),)
    prefactor = scheme_prefactor(spec, grid.n, l)
    return tuple(
        prefactor * symfun.wick_series_paths(grid, t, c, signs, order)
        for c in scheme_coefficients(spec, grid.n)
    )


def limit_samples(
    spec: SchemeSpec,
    hurst: float,
    t: float,
    count: int,
    seed: int,
    /,
    *,
    tail_tol: float = 1e-12,
) -> Tuple[Array, ...]:
    """Sample the weak limit of every component at time ``t``.

    All components share the same Gaussian draws.
    """
    hurst = kernel.hurst_param(hurst)
    if not 0 < t <= 1:
        msg = f"Expected a time in (0, 1]; received t={t}."
        raise ValueError(msg)
    sigma2 = t ** (2 * hurst)
    x = math.sqrt(sigma2) * hermite.gaussian_samples(count, seed)

    if spec.variant == "geometric":
        return (hermite.wick_exponential(sigma2, x),)
    if spec.variant == "drift":
        wick_exp = hermite.wick_exponential(spec.sigma**2 * sigma2, spec.sigma * x)
        return (spec.s0 * math.exp(spec.mu * t) * wick_exp,)
    if spec.variant == "pathwise_sottinen":
        return (np.exp(x),)

    # The limit uses the same coefficients, independent of n
    return tuple(
        hermite.gaussian_wick_functional(c, sigma2, x, tail_tol=tail_tol).value
        for c in _linear_system_series(spec)
    )


MAP_SUM_CAP = 8


def map_sum_vector(grid: kernel.KernelGrid, l: int, k: int, /, kind: str):
    r"""Enumerate maps $m: C \to \{1, ..., l\}$ to build a grade-``k`` vector.

    The coefficient at $|C| = k$ is $k! \sum_m \prod_{i \in C} d_{m(i), i}$,
    summed over injective maps (``kind="injective"``, equal to $U^k_l$),
    all maps (``kind="all"``, equal to $(B^{H,n}_{l/n})^{\diamond k}$),
    or the remaining ones (``kind="noninjective"``).
    Enumerates $l^k$ maps per subset.
    """
    if kind not in ("injective", "all", "noninjective"):
        msg = f"Unknown kind '{kind}'."
        raise ValueError(msg)
    walsh.check_capacity(grid.n, MAP_SUM_CAP, what="map enumeration")
    d = [[float(v) for v in row] for row in grid.d[: l + 1]]
    scale = math.factorial(k)

    coeffs = {}
    for subset in itertools.combinations(range(grid.n), k):
        total = 0.0
        for image in itertools.product(range(1, l + 1), repeat=k):
            injective = len(set(image)) == k
            if (kind == "injective" and not injective) or (
                kind == "noninjective" and injective
            ):
                continue
            total += math.prod(d[j][i] for i, j in zip(subset, image))
        coeffs[walsh.mask_of([i + 1 for i in subset])] = scale * total

    result = walsh.zeros(grid.n)
    if not coeffs:
        return result
    masks = np.asarray(list(coeffs.keys()))
    values = np.asarray(list(coeffs.values()))
    return walsh.WalshVector(grid.n, result.coeffs.at[masks].set(values))
