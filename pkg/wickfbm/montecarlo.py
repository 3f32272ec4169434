"""Monte-Carlo estimation, invariant checks, and convergence studies.

Paths are counter-based: coordinate ``i`` of path ``j`` is a pure
function of ``(seed, j, i)``, so studies are reproducible for any chunking.
"""

import logging
import math

from wickfbm import bounds, hermite, kernel, schemes, symfun, walsh
from wickfbm.backend import containers, func, linalg, np, prng, stats
from wickfbm.backend.typing import Array, Callable, Optional, Sequence, Tuple

logger = logging.getLogger(__name__)

# Squared L2 mass that the truncated series may discard
SERIES_TAIL_TOL = 1e-14


class DegenerateSampleError(ValueError):
    """Raised for samples that admit no moment estimates."""


class CheckFailure(RuntimeError):
    """Raised when an invariant suite fails."""


class StudyConfig(containers.NamedTuple):
    """Configuration of a weak-convergence study.

    If ``coeffs`` is given, the study samples the Wick functional with these
    coefficients instead of the scheme.
    """

    hurst: float
    n_list: tuple
    spec: schemes.SchemeSpec
    times: tuple
    paths: int
    seed: int = 0
    coeffs: Optional[hermite.SeriesCoeffs] = None
    tol: float = 1e-9
    cache_dir: Optional[str] = None
    chunk_size: int = 4096


def validate_study(cfg: StudyConfig, /) -> StudyConfig:
    """Check the invariants of a study configuration and return it."""
    kernel.hurst_param(cfg.hurst)
    n_list = tuple(cfg.n_list)
    if not n_list or any(a >= b for a, b in zip(n_list, n_list[1:])):
        msg = f"n_list must be nonempty and strictly increasing; received {n_list}."
        raise ValueError(msg)
    if n_list[0] < 1:
        msg = f"Step counts must be positive; received {n_list}."
        raise ValueError(msg)
    if cfg.paths < 2:
        msg = f"A study needs at least two paths; received paths={cfg.paths}."
        raise ValueError(msg)
    if any(not 0 <= t <= 1 for t in cfg.times):
        msg = f"Times must lie in [0, 1]; received {cfg.times}."
        raise ValueError(msg)
    if cfg.chunk_size < 1:
        msg = f"The chunk size must be positive; received {cfg.chunk_size}."
        raise ValueError(msg)
    return cfg


def sampler_paths(n: int, /, *, num: int, start: int = 0) -> Callable:
    """Construct a sampler of ``num`` sign paths of length ``n``.

    The returned function maps a key to an array with shape ``(num, n)``.
    """

    def sample(key):
        def single(j):
            return prng.rademacher(prng.fold_in(key, j), shape=(n,), dtype=float)

        return func.vmap(single)(np.arange(start, start + num))

    return sample


def sample_paths(n: int, count: int, seed: int, /, start: int = 0) -> Array:
    """Draw paths ``start, ..., start + count - 1`` of the seeded stream."""
    if count < 1:
        msg = f"Expected a positive number of paths; received count={count}."
        raise ValueError(msg)
    if n < 1:
        msg = f"Expected a positive path length; received n={n}."
        raise ValueError(msg)
    return sampler_paths(n, num=count, start=start)(prng.prng_key(seed))


def estimator(integrand: Callable, /, sampler: Callable) -> Callable:
    """Construct a Monte-Carlo estimator of the mean of an integrand.

    Parameters
    ----------
    integrand
        Function of one path (and optional parameters).
    sampler
        Function that maps a key to a batch of paths, for example the
        return value of [sampler_paths][wickfbm.montecarlo.sampler_paths].

    Returns
    -------
    estimate
        A function that maps a random key (and parameters) to an estimate.
    """

    def estimate(key, *parameters):
        samples = sampler(key)
        values = func.vmap(lambda p: integrand(p, *parameters))(samples)
        return np.mean(values, axis=0)

    return estimate


def walsh_integrand(x: walsh.WalshVector, /) -> Callable:
    """Construct the integrand that evaluates a Walsh vector along a path."""

    def integrand(path):
        return walsh.characters(path) @ x.coeffs

    return integrand


def exhaustive_mean(x: walsh.WalshVector, /) -> float:
    """Average a random variable over all $2^n$ paths."""
    return float(np.mean(walsh.evaluate_all_paths(x)))


def series_order(grid: kernel.KernelGrid, coeffs: hermite.SeriesCoeffs, t: float, /):
    r"""Choose a truncation order for sampling a Wick series at time ``t``.

    Since $e_k(b^2) \le (\sum_i b_i^2)^k / k!$, the Gaussian tail bound with
    $\sigma^2 = \sum_i b_{t,i}^2$ also bounds the discarded discrete mass.
    """
    l = kernel.lattice_index(grid.n, t)
    row = grid.b[l, :l]
    variance = float(np.sum(row * row))
    if l == 0:
        return 0
    tail_tol = math.sqrt(SERIES_TAIL_TOL)
    order = hermite.truncation_order(coeffs, variance, tail_tol, max_order=l)
    return min(order, l)


def scheme_samples(
    grid: kernel.KernelGrid,
    spec: schemes.SchemeSpec,
    t: float,
    count: int,
    seed: int,
    /,
    *,
    coeffs: Optional[hermite.SeriesCoeffs] = None,
    chunk_size: int = 4096,
) -> Tuple[Array, ...]:
    """Evaluate the scheme (or a Wick series) at time ``t`` along many paths.

    Paths are processed in chunks of ``chunk_size``; the result does not
    depend on the chunk size.
    """
    family = scheme_family(spec, grid.n, coeffs)
    orders = () if family is None else tuple(_safe_order(grid, c, t) for c in family)
    l = kernel.lattice_index(grid.n, t)
    prefactor = 1.0 if coeffs is not None else schemes.scheme_prefactor(spec, grid.n, l)

    chunks = []
    for start in range(0, count, chunk_size):
        size = min(chunk_size, count - start)
        signs = sample_paths(grid.n, size, seed, start)
        chunks.append(_evaluate_batch(grid, spec, t, signs, family, orders, prefactor))
        logger.debug("Evaluated paths %d to %d at t=%s", start, start + size, t)
    return tuple(np.concatenate(parts) for parts in zip(*chunks))


def scheme_family(spec, n, coeffs):
    """Return the coefficient families sampled for a scheme, or None for pathwise."""
    if coeffs is not None:
        return (coeffs,)
    if spec.variant == "pathwise_sottinen":
        return None
    return schemes.scheme_coefficients(spec, n)


def _safe_order(grid, coeffs, t):
    try:
        return series_order(grid, coeffs, t)
    except hermite.TruncationError:
        # The exact sum terminates at floor(nt) anyway
        return None


def _evaluate_batch(grid, spec, t, signs, family, orders, prefactor):
    if family is None:
        return schemes.scheme_series_paths(grid, spec, t, signs)
    return tuple(
        prefactor * symfun.wick_series_paths(grid, t, c, signs, order)
        for c, order in zip(family, orders)
    )


class MomentReport(containers.NamedTuple):
    """Sample moments with the standard errors of mean and variance."""

    mean: float
    variance: float
    std_error: float
    count: int
    variance_error: float


def moment_report(values: Array, /) -> MomentReport:
    """Estimate mean and (unbiased) variance of a sample."""
    values = np.asarray(values, dtype=float)
    count = np.shape(values)[0]
    if count < 2:
        msg = f"Moments need at least two samples; received {count}."
        raise DegenerateSampleError(msg)
    if not np.all(np.isfinite(values)):
        msg = "The sample contains non-finite values."
        raise DegenerateSampleError(msg)
    mean = float(np.mean(values))
    variance = float(np.var(values, ddof=1))
    # Delta method: Var(s^2) ~ (m4 - s^4) / count
    fourth = float(np.mean((values - mean) ** 4))
    variance_error = math.sqrt(max(fourth - variance**2, 0.0) / count)
    std_error = math.sqrt(variance / count)
    return MomentReport(mean, variance, std_error, count, variance_error)


def ks_distance(sample_a: Array, sample_b: Array, /) -> float:
    """Compute the two-sample Kolmogorov-Smirnov statistic."""
    if np.shape(sample_a)[0] == 0 or np.shape(sample_b)[0] == 0:
        msg = "The Kolmogorov-Smirnov distance needs two nonempty samples."
        raise ValueError(msg)
    return stats.ks_2samp(sample_a, sample_b)


class CheckResult(containers.NamedTuple):
    """Outcome of an invariant check.

    ``worst_ratio`` is the largest observed ratio of left- to right-hand side;
    the check passes if it does not exceed one.
    """

    name: str
    passed: bool
    worst_ratio: float
    detail: str


def _result(name, ratio, detail):
    ratio = float(ratio)
    passed = bool(ratio <= 1.0)
    status = "pass" if passed else "FAIL"
    logger.info("%s: %s (worst ratio %.3e; %s)", name, status, ratio, detail)
    return CheckResult(name, passed, ratio, detail)


def _random_times(key, count):
    return prng.uniform(key, shape=(count, 2))


def _lattice_lag(grid, t, s):
    return (kernel.lattice_index(grid.n, t) - kernel.lattice_index(grid.n, s)) / grid.n


def check_coefficient_bound(grid: kernel.KernelGrid, /) -> CheckResult:
    """Every coefficient is below $2 c_H n^{-(1-H)}$."""
    bound = bounds.coefficient_bound(grid.hurst, grid.n) * (1 + grid.tol)
    ratio = float(np.array_max(grid.b)) / bound
    return _result("coefficient_bound", ratio, f"n={grid.n}")


def check_increment_bound(grid: kernel.KernelGrid, /) -> CheckResult:
    """All lattice increments satisfy the fBm increment bound."""
    gram = grid.b @ grid.b.T
    diag = linalg.diagonal(gram)
    lhs = diag[:, None] + diag[None, :] - 2 * gram
    lags = np.arange(grid.n + 1.0)
    rhs = np.abs(lags[:, None] - lags[None, :]) / grid.n
    rhs = rhs ** (2 * grid.hurst) + grid.tol
    ratio = np.array_max(lhs / rhs)
    return _result("increment_bound", ratio, f"n={grid.n}")


def check_engine_equivalence(
    grid: kernel.KernelGrid, /, *, cases: int = 200, seed: int = 0, rtol: float = 1e-10
) -> CheckResult:
    """Compare elementary symmetric polynomials with the dense Walsh engine."""
    n = grid.n
    walsh.check_capacity(n, 12, what="engine equivalence")
    key = prng.prng_key(seed)
    times = _random_times(prng.fold_in(key, 0), cases)
    orders = prng.uniform(prng.fold_in(key, 1), shape=(cases,))
    paths = sample_paths(n, cases, seed)

    worst = 0.0
    for j in range(cases):
        t, s = (float(v) for v in times[j])
        k = int(float(orders[j]) * (n + 1))
        walk_t = walsh.random_walk_vector(grid, t)
        walk_s = walsh.random_walk_vector(grid, s)
        power_t = walsh.wick_power(walk_t, k)
        power_s = walsh.wick_power(walk_s, k)

        # Scales that bound the result without cancellation
        path_scale = float(np.sum(np.abs(power_t.coeffs)))
        norms = walsh.norm_squared(power_t) * walsh.norm_squared(power_s)
        inner_scale = math.sqrt(norms)
        fast_path = symfun.wick_power_path(grid, t, k, paths[j])
        fast_inner = symfun.wick_power_inner(grid, t, s, k)
        comparisons = [
            (fast_path, walsh.evaluate(power_t, paths[j]), path_scale),
            (fast_inner, walsh.inner_product(power_t, power_s), inner_scale),
        ]
        for fast, exact, scale in comparisons:
            error = abs(fast - exact)
            worst = max(worst, error / max(scale, 1e-300) / rtol)
    return _result("engine_equivalence", worst, f"n={n}, cases={cases}")


def check_walsh_laws(n: int, /, *, seed: int = 0, rtol: float = 1e-10) -> CheckResult:
    """Check the algebra laws of both products on random vectors."""
    walsh.check_capacity(n, walsh.POINTWISE_CAP, what="Walsh laws")
    key = prng.prng_key(seed)
    x, y, z = (
        walsh.from_coeffs(prng.normal(prng.fold_in(key, j), shape=(2**n,)))
        for j in range(3)
    )
    wick = walsh.wick_product
    unit = walsh.unit(n)
    checks = [
        (wick(x, y), wick(y, x)),
        (wick(wick(x, y), z), wick(x, wick(y, z))),
        (wick(x, unit), x),
        (walsh.pointwise_product(x, y), walsh.pointwise_product(y, x)),
        (walsh.pointwise_product(x, unit), x),
    ]
    worst = 0.0
    for left, right in checks:
        error = float(np.array_max(np.abs(left.coeffs - right.coeffs)))
        scale = float(np.array_max(np.abs(right.coeffs)))
        worst = max(worst, error / scale / rtol)

    # The pointwise product is the product of the values along every path
    product = walsh.evaluate_all_paths(walsh.pointwise_product(x, y))
    expected = walsh.evaluate_all_paths(x) * walsh.evaluate_all_paths(y)
    error = float(np.array_max(np.abs(product - expected)))
    worst = max(worst, error / float(np.array_max(np.abs(expected))) / rtol)
    return _result("walsh_laws", worst, f"n={n}")


def check_map_sums(
    grid: kernel.KernelGrid, /, max_order: int = 4, *, rtol: float = 1e-12
) -> CheckResult:
    """Compare the U recursion with map enumerations at every step."""
    state = schemes.u_init(grid, max_grade=max_order)
    worst = 0.0
    for l in range(1, grid.n + 1):
        state = schemes.u_step(state)
        for k in range(min(max_order, l) + 1):
            u = schemes.u_dense(state, k)
            injective = schemes.map_sum_vector(grid, l, k, kind="injective")
            every = schemes.map_sum_vector(grid, l, k, kind="all")
            other = schemes.map_sum_vector(grid, l, k, kind="noninjective")
            scale = max(float(np.array_max(np.abs(every.coeffs))), 1e-300)
            residuals = (
                u.coeffs - injective.coeffs,
                every.coeffs - injective.coeffs - other.coeffs,
            )
            for r in residuals:
                worst = max(worst, float(np.array_max(np.abs(r))) / scale / rtol)
    return _result("map_sums", worst, f"n={grid.n}, K={max_order}")


def check_hermite_recursion(
    grid: kernel.KernelGrid,
    /,
    max_order: int = 4,
    *,
    t: float = 1.0,
    rtol: float = 1e-10,
) -> CheckResult:
    """Compare the Hermite remainder with its closed form and its bound."""
    worst = 0.0
    for N in range(1, max_order + 1):
        result = schemes.discrete_hermite_residual(grid, t, N)
        difference = result.residual.coeffs - result.closed_form.coeffs
        scale = max(math.sqrt(result.norm_squared), 1e-300)
        error = float(np.array_max(np.abs(difference))) / scale
        worst = max(worst, error / rtol, result.norm_squared / result.bound)
    return _result("hermite_recursion", worst, f"n={grid.n}, N<={max_order}")


def check_increment_inequality(
    grid: kernel.KernelGrid, /, max_power: int = 10, *, pairs: int = 50, seed: int = 0
) -> CheckResult:
    r"""Check $\frac{1}{N!}\|W_t - W_s\|^2 \le 8^N |dt|^{2H}$ at random times."""
    times = _random_times(prng.prng_key(seed), pairs)
    worst = 0.0
    for t, s in times.tolist():
        dt = _lattice_lag(grid, t, s)
        if dt == 0:
            continue
        for N in range(1, max_power + 1):
            lhs = symfun.wick_power_difference_norm(grid, t, s, N)
            rhs = bounds.wick_increment_bound(grid.hurst, dt, N)
            worst = max(worst, lhs / rhs)
    return _result("increment_inequality", worst, f"n={grid.n}, N<={max_power}")


def check_defect_bound(
    grid: kernel.KernelGrid, /, max_power: int = 4, *, pairs: int = 50, seed: int = 0
) -> CheckResult:
    """Check that the Wick-power defect lies between zero and its bound."""
    times = _random_times(prng.prng_key(seed), pairs)
    worst = 0.0
    for a, b in times.tolist():
        t, s = max(a, b), min(a, b)
        worst = max(worst, _defect_ratio(grid, t, s, max_power))
    return _result("defect_bound", worst, f"n={grid.n}, N<={max_power}")


def _defect_ratio(grid, t, s, max_power):
    worst = 0.0
    r_tt = kernel.discrete_covariance(grid, t, t)
    r_ss = kernel.discrete_covariance(grid, s, s)
    r_ts = kernel.discrete_covariance(grid, t, s)
    for N in range(1, max_power + 1):
        if kernel.lattice_index(grid.n, s) < N:
            continue
        norm = symfun.wick_power_difference_norm(grid, t, s, N)
        defect = r_tt**N + r_ss**N - 2 * r_ts**N - norm
        bound = bounds.wick_difference_defect_bound(grid.hurst, grid.n, t, N)
        # Rounding may leave a tiny negative defect
        if defect < -1e-12:
            return math.inf
        worst = max(worst, defect / bound)
    return worst


def check_wick_norm_bound(
    grid: kernel.KernelGrid, /, max_power: int = 10
) -> CheckResult:
    r"""Check $\sum_{|C| = N} b_{t,C}^2 \le t^{2HN} / N!$ on every lattice row."""
    worst = 0.0
    for l in range(1, grid.n + 1):
        row = grid.b[l, :l]
        e = symfun.esym(row * row, max_power).e
        for N in range(1, min(max_power, l) + 1):
            rhs = bounds.wick_power_norm_bound(grid.hurst, l / grid.n, N)
            worst = max(worst, float(e[N]) / rhs / (1 + grid.tol) ** (2 * N))
    return _result("wick_norm_bound", worst, f"n={grid.n}, N<={max_power}")


def check_substitution_error(
    grid: kernel.KernelGrid, coeffs: hermite.SeriesCoeffs, /, t: float = 1.0
) -> CheckResult:
    """Check the mean-square distance of the two discrete approximations."""
    result = schemes.u_difference_norm(grid, coeffs, t)
    ratio = result.value / result.bound
    return _result("substitution_error", ratio, f"n={grid.n}, '{coeffs.label}'")


def check_series_tightness(
    grid: kernel.KernelGrid,
    coeffs: hermite.SeriesCoeffs,
    /,
    *,
    pairs: int = 20,
    seed: int = 0,
) -> CheckResult:
    r"""Check $\mathbb{E}[(F_t - F_s)^2] \le A^2 e^{8 C^2} |dt|^{2H}$."""
    constant = bounds.series_increment_constant(coeffs.growth, scale=coeffs.scale)
    times = _random_times(prng.prng_key(seed), pairs)
    worst = 0.0
    for t, s in times.tolist():
        dt = _lattice_lag(grid, t, s)
        if dt == 0:
            continue
        lhs = symfun.wick_series_increment_norm(grid, coeffs, t, s)
        worst = max(worst, lhs / (constant * bounds.increment_bound(grid.hurst, dt)))
    return _result("series_tightness", worst, f"n={grid.n}, '{coeffs.label}'")


def check_sampled_mean(
    x: walsh.WalshVector, /, *, count: int = 4096, seed: int = 0
) -> CheckResult:
    """Check that the sampled mean is within four standard errors of the exact one."""
    values = func.vmap(walsh_integrand(x))(sample_paths(x.n, count, seed))
    report = moment_report(values)
    exact = walsh.expectation(x)
    slack = 4 * report.std_error
    error = abs(report.mean - exact)
    ratio = error / slack if slack > 0 else error / 1e-12
    return _result("sampled_mean", ratio, f"n={x.n}, count={count}")


def check_geometric_mean(
    grid: kernel.KernelGrid,
    /,
    *,
    count: int = 100_000,
    seed: int = 0,
    chunk_size: int = 4096,
) -> CheckResult:
    """Check that the sampled geometric scheme at t = 1 has mean one.

    The tolerance is four standard errors of the sample mean.
    """
    (samples,) = scheme_samples(
        grid, schemes.geometric(), 1.0, count, seed, chunk_size=chunk_size
    )
    report = moment_report(samples)
    ratio = abs(report.mean - 1.0) / (4 * report.std_error)
    return _result("geometric_mean", ratio, f"n={grid.n}, count={count}")


def selftest(
    hurst: float = 0.75,
    /,
    n_values: Sequence[int] = (6, 8, 10, 12),
    *,
    seed: int = 0,
    tol: float = 1e-9,
    cache_dir=None,
    raise_on_failure: bool = False,
    equivalence_cases: int = 200,
    mean_n: Optional[int] = 512,
    mean_paths: int = 100_000,
) -> list:
    """Run all invariant suites on small grids.

    The sampled mean of the geometric scheme is checked once more on a grid
    with ``mean_n`` steps and ``mean_paths`` paths; ``mean_n=None`` skips it.

    Raises
    ------
    CheckFailure
        If ``raise_on_failure`` is set and any suite fails.
    """
    results = []
    for n in n_values:
        grid = kernel.build_grid(hurst, n, tol, cache_dir=cache_dir)
        results.append(check_coefficient_bound(grid))
        results.append(check_increment_bound(grid))
        results.append(check_wick_norm_bound(grid))
        results.append(check_increment_inequality(grid, seed=seed))
        results.append(check_defect_bound(grid, seed=seed))
        exponential = hermite.exponential_coeffs()
        results.append(check_series_tightness(grid, exponential, seed=seed))
        if n <= walsh.POINTWISE_CAP:
            cases = equivalence_cases
            results.append(check_engine_equivalence(grid, cases=cases, seed=seed))
            results.append(check_substitution_error(grid, exponential))
        if n <= 10:
            results.append(check_hermite_recursion(grid))
            results.append(check_walsh_laws(min(n, 8), seed=seed))
            walk = walsh.random_walk_vector(grid, 1.0)
            results.append(check_sampled_mean(walsh.wick_power(walk, 2), seed=seed))
        if n <= 6:
            results.append(check_map_sums(grid))
        _raise_first_failure(results, raise_on_failure)

    if mean_n is not None:
        grid = kernel.build_grid(hurst, mean_n, tol, cache_dir=cache_dir)
        results.append(check_geometric_mean(grid, count=mean_paths, seed=seed))
        _raise_first_failure(results, raise_on_failure)
    return results


def _raise_first_failure(results, raise_on_failure):
    failed = [r for r in results if not r.passed]
    if failed and raise_on_failure:
        msg = f"Check '{failed[0].name}' failed: {failed[0].detail}."
        raise CheckFailure(msg)


def fit_loglog_slope(xs: Sequence[float], ys: Sequence[float], /) -> float:
    """Fit the slope of log(ys) against log(xs) by least squares."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if np.shape(xs)[0] < 2:
        msg = "A slope needs at least two points."
        raise ValueError(msg)
    if not (np.all(xs > 0) and np.all(ys > 0)):
        msg = "Log-log fits need positive values."
        raise ValueError(msg)
    u = np.log(xs) - np.mean(np.log(xs))
    v = np.log(ys) - np.mean(np.log(ys))
    return float(np.sum(u * v) / np.sum(u * u))


class RateStudy(containers.NamedTuple):
    """Exact substitution errors along n and the fitted slopes."""

    rows: list
    slopes: dict


def run_rate_study(
    hurst: float,
    n_list: Sequence[int],
    spec: schemes.SchemeSpec,
    /,
    t: float = 1.0,
    *,
    tol: float = 1e-9,
    cache_dir=None,
) -> RateStudy:
    """Compute the exact substitution error for every n and fit its decay rate."""
    rows = []
    for n in n_list:
        grid = kernel.build_grid(hurst, n, tol, cache_dir=cache_dir)
        names = schemes.components(spec)
        for name, coeffs in zip(names, schemes.scheme_coefficients(spec, n)):
            result = schemes.u_difference_norm(grid, coeffs, t)
            rows.append(
                {
                    "n": n,
                    "t": t,
                    "component": name,
                    "difference": result.value,
                    "bound": result.bound,
                    "constant": result.constant,
                }
            )
            logger.info("Rate study n=%d (%s): %.6e", n, name, result.value)

    slopes = {}
    for name in schemes.components(spec):
        selected = [r for r in rows if r["component"] == name]
        xs = [r["n"] for r in selected]
        ys = [r["difference"] for r in selected]
        slopes[name] = fit_loglog_slope(xs, ys)
    for row in rows:
        row["slope"] = slopes[row["component"]]
    return RateStudy(rows, slopes)


def run_study(cfg: StudyConfig, /) -> list:
    """Run the weak-convergence study and return one row per (n, t, component)."""
    cfg = validate_study(cfg)
    if not cfg.times:
        return []

    H = cfg.hurst
    rows = []
    for n in cfg.n_list:
        grid = kernel.build_grid(H, n, cfg.tol, cache_dir=cfg.cache_dir)
        names = ("f",) if cfg.coeffs is not None else schemes.components(cfg.spec)
        for t in cfg.times:
            covariance_error = _covariance_error(grid, t, cfg.times)
            samples = scheme_samples(
                grid,
                cfg.spec,
                t,
                cfg.paths,
                cfg.seed,
                coeffs=cfg.coeffs,
                chunk_size=cfg.chunk_size,
            )
            references = _reference_samples(cfg, t)
            statuses = {
                "increment_check": _status(_increment_status(grid, t, cfg.times)),
                "defect_check": _status(_defect_status(grid, t, cfg.times)),
                "substitution_check": _status(_substitution_status(grid, cfg, t)),
            }
            for j, name in enumerate(names):
                report = moment_report(samples[j])
                ks = math.nan
                if references is not None:
                    ks = ks_distance(samples[j], references[j])
                rows.append(
                    {
                        "n": n,
                        "t": t,
                        "component": name,
                        "covariance_error": covariance_error,
                        "mean": report.mean,
                        "variance": report.variance,
                        "std_error": report.std_error,
                        "variance_error": report.variance_error,
                        "ks_distance": ks,
                        **statuses,
                    }
                )
        logger.info("Study finished n=%d", n)
    _mark_ks_trend(rows)
    return rows


def _mark_ks_trend(rows):
    """Flag whether the KS distance decreased since the previous n."""
    previous = {}
    for row in rows:
        key = (row["t"], row["component"])
        ks = row["ks_distance"]
        passed = None
        if key in previous and not (math.isnan(ks) or math.isnan(previous[key])):
            passed = ks < previous[key]
        row["ks_trend"] = _status(passed)
        previous[key] = ks


def _covariance_error(grid, t, times):
    errors = [
        kernel.discrete_covariance(grid, t, s) - kernel.fbm_covariance(grid.hurst, t, s)
        for s in times
    ]
    return max(abs(e) for e in errors)


def _reference_samples(cfg, t):
    if t == 0:
        return None
    if cfg.coeffs is not None:
        sampler = hermite.limit_marginal_sampler
        return (sampler(cfg.coeffs, cfg.hurst, t, cfg.paths, cfg.seed),)
    return schemes.limit_samples(cfg.spec, cfg.hurst, t, cfg.paths, cfg.seed)


def _status(passed):
    if passed is None:
        return "skip"
    return "pass" if passed else "fail"


def _increment_status(grid, t, times):
    worst = 0.0
    for s in times:
        dt = _lattice_lag(grid, t, s)
        if dt == 0:
            continue
        for N in range(1, 11):
            lhs = symfun.wick_power_difference_norm(grid, t, s, N)
            worst = max(worst, lhs / bounds.wick_increment_bound(grid.hurst, dt, N))
    return worst <= 1.0


def _defect_status(grid, t, times):
    earlier = [s for s in times if s <= t and kernel.lattice_index(grid.n, s) >= 1]
    if not earlier:
        return None
    return max(_defect_ratio(grid, t, s, 4) for s in earlier) <= 1.0


def _substitution_status(grid, cfg, t):
    if grid.n > walsh.POINTWISE_CAP:
        return None
    family = scheme_family(cfg.spec, grid.n, cfg.coeffs)
    if family is None:
        return None
    results = [schemes.u_difference_norm(grid, c, t) for c in family]
    return all(r.value <= r.bound for r in results)
