r"""Wick analytic functionals of Gaussian variables.

A Wick analytic functional is a series

$$
F = \sum_{k \ge 0} \frac{a_k}{k!} X^{\diamond k},
\quad X^{\diamond k} = h^k_{\sigma^2}(X),
$$

where $X \sim N(0, \sigma^2)$ and $h^k_{\sigma^2}$ are the Hermite polynomials
with leading coefficient one. Its coefficients must satisfy a growth
certificate $|a_k| \le A C^k$ so that the series converges in $L^2$.
"""

import logging
import math

from wickfbm import bounds, kernel
from wickfbm.backend import containers, control_flow, func, np, prng
from wickfbm.backend.typing import Array, Callable, Optional

logger = logging.getLogger(__name__)


class CertificateError(ValueError):
    """Raised when coefficients violate (or lack) their growth certificate."""


class TruncationError(RuntimeError):
    """Raised when no truncation order meets the requested tail tolerance."""


class SeriesCoeffs(containers.NamedTuple):
    r"""Coefficients of a Wick analytic functional.

    ``terms(order)`` returns the array $(a_0, ..., a_{order})$.
    ``growth`` is the certified constant $C$ with $|a_k| \le$ ``scale`` $C^k$.
    """

    terms: Callable[[int], Array]
    growth: Optional[float]
    label: str = "series"
    scale: float = 1.0


class WickFunctionalValue(containers.NamedTuple):
    """A truncated Wick analytic functional and the norm bound of its tail."""

    value: Array
    tail_bound: float
    order: int


def coefficients(coeffs: SeriesCoeffs, order: int, /) -> Array:
    """Evaluate and certify the coefficients up to (and including) ``order``."""
    if order < 0:
        msg = f"The order must be non-negative; received order={order}."
        raise ValueError(msg)
    if coeffs.growth is None:
        msg = f"The series '{coeffs.label}' has no growth certificate."
        raise CertificateError(msg)

    a = np.asarray(coeffs.terms(order), dtype=float)
    if np.shape(a) != (order + 1,):
        msg = f"Expected {order + 1} coefficients; received shape {np.shape(a)}."
        raise ValueError(msg)

    certified = coeffs.scale * coeffs.growth ** np.arange(order + 1.0)
    violated = np.abs(a) > certified * (1 + 1e-12)
    if np.any(violated):
        k = int(np.nonzero(violated)[0][0])
        msg = (
            f"Coefficient a_{k}={float(a[k])!r} of '{coeffs.label}' exceeds "
            f"{coeffs.scale} * {coeffs.growth}^{k}."
        )
        raise CertificateError(msg)
    return a


def exponential_coeffs(sigma: float = 1.0, /) -> SeriesCoeffs:
    r"""Coefficients $a_k = \sigma^k$ of $\exp^\diamond(\sigma X)$."""

    def terms(order):
        return sigma ** np.arange(order + 1.0)

    return SeriesCoeffs(terms, growth=abs(sigma), label=f"exp(sigma={sigma})")


def identity_coeffs() -> SeriesCoeffs:
    """Coefficients of $F = X$."""

    def terms(order):
        return np.where(np.arange(order + 1) == 1, 1.0, 0.0)

    return SeriesCoeffs(terms, growth=1.0, label="identity")


def wick_power_coeffs(N: int, /) -> SeriesCoeffs:
    r"""Coefficients $a_k = N! \, 1_{k = N}$ of the Wick power $X^{\diamond N}$."""
    if N < 0:
        msg = f"The Wick power must be non-negative; received N={N}."
        raise ValueError(msg)
    factorial = float(math.factorial(N))
    growth = factorial ** (1 / N) if N > 0 else 1.0

    def terms(order):
        return np.where(np.arange(order + 1) == N, factorial, 0.0)

    # Rounding in the N-th root must not break the certificate
    return SeriesCoeffs(terms, growth=growth * (1 + 1e-12), label=f"power(N={N})")


def sine_coeffs() -> SeriesCoeffs:
    r"""Coefficients of $\sin^\diamond(X)$: $a_{2j+1} = (-1)^j$, zero otherwise."""

    def terms(order):
        k = np.arange(order + 1)
        sign = np.where(k % 4 == 1, 1.0, -1.0)
        return np.where(k % 2 == 1, sign, 0.0)

    return SeriesCoeffs(terms, growth=1.0, label="sin")


def cosine_coeffs() -> SeriesCoeffs:
    r"""Coefficients of $\cos^\diamond(X)$: $a_{2j} = (-1)^j$, zero otherwise."""

    def terms(order):
        k = np.arange(order + 1)
        sign = np.where(k % 4 == 0, 1.0, -1.0)
        return np.where(k % 2 == 0, sign, 0.0)

    return SeriesCoeffs(terms, growth=1.0, label="cos")


def coeffs_from_sequence(
    values, /, growth: Optional[float], *, scale: float = 1.0, label="sequence"
) -> SeriesCoeffs:
    """Wrap a finite coefficient sequence, extended by zeros."""
    values = np.asarray(values, dtype=float)
    (length,) = np.shape(values)

    def terms(order):
        if order + 1 <= length:
            return values[: order + 1]
        return np.concatenate([values, np.zeros((order + 1 - length,))])

    return SeriesCoeffs(terms, growth=growth, label=label, scale=scale)


def hermite_poly(degree: int, sigma2: float, x, /) -> Array:
    r"""Evaluate the Hermite polynomial $h^N_{\sigma^2}(x)$.

    Uses the recursion $h^{k+1} = x h^k - k \sigma^2 h^{k-1}$
    with $h^0 = 1$ and $h^1 = x$.
    """
    _check_variance(sigma2)
    if degree < 0:
        msg = f"The degree must be non-negative; received degree={degree}."
        raise ValueError(msg)
    x = np.asarray(x, dtype=float)
    if degree == 0:
        return np.ones_like(x)

    def step(carry, k):
        h_prev, h = carry
        return (h, x * h - k * sigma2 * h_prev), None

    (_, h), _ = control_flow.scan(step, (np.ones_like(x), x), xs=np.arange(1.0, degree))
    return h


def normalised_hermite_table(order: int, sigma2: float, x, /) -> Array:
    r"""Tabulate $g_k = h^k_{\sigma^2}(x) / k!$ for $k = 0, ..., $ ``order``.

    The normalised recursion $g_{k+1} = (x g_k - \sigma^2 g_{k-1}) / (k + 1)$
    avoids the overflow of $h^k$ and $k!$ separately.
    The result has shape ``(order + 1, *x.shape)``.
    """
    _check_variance(sigma2)
    x = np.asarray(x, dtype=float)
    if order == 0:
        return np.ones_like(x)[None, ...]

    def step(carry, k):
        g_prev, g = carry
        g_next = (x * g - sigma2 * g_prev) / (k + 1)
        return (g, g_next), g_next

    init = (np.ones_like(x), x)
    _, rest = control_flow.scan(step, init, xs=np.arange(1.0, order))
    return np.concatenate([np.stack(init), rest])


def truncation_order(
    coeffs: SeriesCoeffs,
    sigma2: float,
    /,
    tail_tol: float = 1e-12,
    *,
    max_order: int = 512,
) -> int:
    """Find the smallest order whose tail norm bound is at most ``tail_tol``."""
    if coeffs.growth is None:
        msg = f"The series '{coeffs.label}' has no growth certificate."
        raise CertificateError(msg)
    tails = bounds.hermite_tail_bounds(
        coeffs.growth, sigma2, max_order, scale=coeffs.scale
    )
    reached = np.sqrt(tails) <= tail_tol
    if not np.any(reached):
        msg = (
            f"The tail of '{coeffs.label}' with variance {sigma2} stays above "
            f"{tail_tol} up to order {max_order}."
        )
        raise TruncationError(msg)
    return int(np.nonzero(reached)[0][0])


def gaussian_wick_functional(
    coeffs: SeriesCoeffs,
    sigma2: float,
    x,
    /,
    order: Optional[int] = None,
    *,
    tail_tol: float = 1e-12,
    max_order: int = 512,
) -> WickFunctionalValue:
    r"""Evaluate $\sum_{k \le K} \frac{a_k}{k!} h^k_{\sigma^2}(x)$.

    If ``order`` is omitted, the truncation order $K$ is the smallest order
    whose tail bound (in $L^2$ norm) is below ``tail_tol``.
    The returned tail bound always refers to the order that was used.
    """
    _check_variance(sigma2)
    if order is None:
        order = truncation_order(coeffs, sigma2, tail_tol, max_order=max_order)
    a = coefficients(coeffs, order)
    table = normalised_hermite_table(order, sigma2, x)
    value = np.sum(np.reshape(a, (-1,) + (1,) * (table.ndim - 1)) * table, axis=0)
    tail = bounds.hermite_tail_bound(
        coeffs.growth, sigma2, order, scale=coeffs.scale
    )
    return WickFunctionalValue(value, tail_bound=math.sqrt(tail), order=order)


def wick_exponential(sigma2: float, x, /) -> Array:
    r"""Evaluate $\exp^\diamond(X) = \exp(x - \sigma^2 / 2)$ in closed form."""
    _check_variance(sigma2)
    return np.exp(np.asarray(x, dtype=float) - sigma2 / 2)


def gaussian_samples(count: int, seed: int, /, stream: int = 0) -> Array:
    """Draw standard normals; sample ``j`` depends only on (seed, stream, j)."""
    key = prng.fold_in(prng.prng_key(seed), stream)

    def draw(j):
        return prng.normal(prng.fold_in(key, j), shape=())

    return func.vmap(draw)(np.arange(count))


def limit_marginal_sampler(
    coeffs: SeriesCoeffs,
    hurst: float,
    t: float,
    count: int,
    seed: int,
    /,
    *,
    stream: int = 0,
    tail_tol: float = 1e-12,
) -> Array:
    """Sample the law of a Wick analytic functional of fBm at time ``t``."""
    hurst = kernel.hurst_param(hurst)
    _check_time(t)
    sigma2 = t ** (2 * hurst)
    x = math.sqrt(sigma2) * gaussian_samples(count, seed, stream)
    result = gaussian_wick_functional(coeffs, sigma2, x, tail_tol=tail_tol)
    logger.debug(
        "Sampled %d limit values of '%s' at t=%s with order %d.",
        count,
        coeffs.label,
        t,
        result.order,
    )
    return result.value


def pathwise_limit_sampler(
    hurst: float, t: float, count: int, seed: int, /, *, stream: int = 0
) -> Array:
    r"""Sample $\exp(B^H_t)$, the pathwise limit of the product scheme."""
    hurst = kernel.hurst_param(hurst)
    _check_time(t)
    return np.exp(t**hurst * gaussian_samples(count, seed, stream))


def wick_power_increment_norm(hurst: float, t: float, s: float, N: int, /) -> float:
    r"""Compute $\mathbb{E}[((B_t)^{\diamond N} - (B_s)^{\diamond N})^2]$ for fBm.

    Equals $N! (t^{2HN} + s^{2HN} - 2 R(t, s)^N)$.
    """
    r_tt = kernel.fbm_covariance(hurst, t, t)
    r_ss = kernel.fbm_covariance(hurst, s, s)
    r_ts = kernel.fbm_covariance(hurst, t, s)
    return math.factorial(N) * (r_tt**N + r_ss**N - 2 * r_ts**N)


def _check_variance(sigma2):
    if not sigma2 >= 0:
        msg = f"The variance must be non-negative; received sigma2={sigma2}."
        raise ValueError(msg)


def _check_time(t):
    if not 0 < t <= 1:
        msg = f"Expected a time in (0, 1]; received t={t}."
        raise ValueError(msg)
