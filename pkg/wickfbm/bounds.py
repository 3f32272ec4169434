r"""Closed-form bounds for the discrete Wick calculus of the binary random walk.

Every function returns the right-hand side of an inequality that the library
checks numerically. All functions are cheap scalar evaluations, except
[hermite_tail_bounds][wickfbm.bounds.hermite_tail_bounds], which returns
a whole table.
"""

import math

from wickfbm import kernel
from wickfbm.backend import np, special
from wickfbm.backend.typing import Array


def coefficient_bound(hurst: float, n: int, /) -> float:
    r"""Bound every Walsh coefficient, $b^n_{t,i} \le 2 c_H n^{-(1-H)}$."""
    c_H = kernel.molchan_golosov_constant(hurst)
    return 2 * c_H * n ** (hurst - 1)


def increment_bound(hurst: float, dt: float, /) -> float:
    r"""Bound $\mathbb{E}[(B^{H,n}_t - B^{H,n}_s)^2] \le |dt|^{2H}$ on the lattice."""
    return abs(dt) ** (2 * hurst)


def wick_power_norm_bound(hurst: float, t: float, N: int, /) -> float:
    r"""Bound $\sum_{|C| = N} (b_{t,C})^2 \le t^{2HN} / N!$."""
    return t ** (2 * hurst * N) / math.factorial(N)


def wick_difference_defect_bound(hurst: float, n: int, t: float, N: int, /) -> float:
    r"""Bound the defect between discrete Wick-power increments and their limit.

    The defect
    $\mathbb{E}[B_t^2]^N + \mathbb{E}[B_s^2]^N - 2 \mathbb{E}[B_t B_s]^N
    - \frac{1}{N!} \mathbb{E}[((B_t)^{\diamond N} - (B_s)^{\diamond N})^2]$
    lies in $[0, 2 c_H^2 N^2 t^{2H(N-1)} n^{-(2-2H)}]$
    whenever $t \ge s$ and $\lfloor ns \rfloor \ge N$.
    """
    c_H = kernel.molchan_golosov_constant(hurst)
    return 2 * c_H**2 * N**2 * t ** (2 * hurst * (N - 1)) * n ** (-(2 - 2 * hurst))


def wick_increment_bound(hurst: float, dt: float, N: int, /) -> float:
    r"""Bound the normalised mean-square increment of a Wick power.

    $$
    \frac{1}{N!}\mathbb{E}[((B_t)^{\diamond N} - (B_s)^{\diamond N})^2]
    \le 8^N |dt|^{2H},
    $$

    where $dt$ is the lattice distance of $t$ and $s$.
    """
    return 8.0**N * abs(dt) ** (2 * hurst)


def inner_product_lemma_bound(
    norm_x: float, norm_y: float, distance: float, N: int, /, *, sharp: bool = False
) -> float:
    r"""Bound $\|x\|^{2N} + \|y\|^{2N} - 2 \langle x, y \rangle^N$.

    The default bound is
    $2^{N+1} (\|x\| + \|y\|)^{2(N-1)} \|x - y\|^2$.
    With ``sharp=True``, the constant $2^{N+1}$ is replaced by
    $(1 - 2^{1-N}) N^2 + (2 - 2^{1-N})$, which is at most $2^N$ unless $N = 3$.
    """
    if N < 1:
        msg = f"The exponent must be positive; received N={N}."
        raise ValueError(msg)
    if sharp:
        half_power = 0.5 ** (N - 1)
        constant = (1 - half_power) * N**2 + (2 - half_power)
    else:
        constant = 2.0 ** (N + 1)
    return constant * (norm_x + norm_y) ** (2 * (N - 1)) * distance**2


def hermite_residual_bound(hurst: float, n: int, N: int, /) -> float:
    r"""Bound the remainder of the discrete Hermite recursion.

    Returns the right-hand side of $\mathbb{E}[R^2] \le 16 c_H^4 N! N^3 n^{-(4-4H)}$.
    """
    c_H = kernel.molchan_golosov_constant(hurst)
    return 16 * c_H**4 * math.factorial(N) * N**3 * n ** (-(4 - 4 * hurst))


def u_difference_constant(
    growth: float, hurst: float, /, t: float = 1.0, *, scale: float = 1.0
) -> float:
    r"""Compute the constant $K$ that bounds the substitution error.

    $$
    K = A^2 \sum_{k \ge 2} C^{2k} \frac{(k-1)^3}{(k-1)!} t^{2H(k-1)}
      = A^2 C^2 e^{x} (x^3 + 3x^2 + x), \quad x = C^2 t^{2H},
    $$

    for coefficients with $|a_k| \le A C^k$ (the closed form follows from
    $\sum_j j^3 x^j / j! = e^x (x^3 + 3x^2 + x)$).
    The supremum over $t \in [0, 1]$ is attained at $t = 1$.
    """
    x = growth**2 * t ** (2 * hurst)
    return scale**2 * growth**2 * math.exp(x) * (x**3 + 3 * x**2 + x)


def u_difference_bound(
    growth: float, hurst: float, n: int, /, t: float = 1.0, *, scale: float = 1.0
) -> float:
    r"""Bound the distance of the two discrete approximations by $K n^{1-2H}$."""
    constant = u_difference_constant(growth, hurst, t, scale=scale)
    return constant * n ** (1 - 2 * hurst)


def series_increment_constant(growth: float, /, *, scale: float = 1.0) -> float:
    r"""Compute the modulus $L = A^2 \exp(8 C^2)$ of Wick analytic functionals.

    It enters $\mathbb{E}[(F_t - F_s)^2] \le L |dt|^{2H}$.
    """
    return scale**2 * math.exp(8 * growth**2)


def hermite_tail_bounds(
    growth: float, sigma2: float, max_order: int, /, *, scale: float = 1.0
) -> Array:
    r"""Tabulate $A^2 \sum_{k > K} C^{2k} \sigma^{2k} / k!$ up to ``max_order``.

    This is the squared $L^2$ norm bound of the discarded terms when a Wick
    analytic functional of an $N(0, \sigma^2)$ variable is truncated after
    order $K$.
    """
    rate = growth**2 * sigma2
    extra = max(64, int(8 * rate))
    k = np.arange(max_order + 1 + extra)
    if rate == 0:
        log_terms = np.where(k == 0, 0.0, -np.inf())
    else:
        log_terms = k * math.log(rate) - special.gammaln(k + 1.0)
    terms = np.exp(log_terms)
    tails = np.flip(np.cumsum(np.flip(terms)))
    # tails[K] includes term K; shift by one to exclude it
    return scale**2 * tails[1 : max_order + 2]


def hermite_tail_bound(
    growth: float, sigma2: float, order: int, /, *, scale: float = 1.0
) -> float:
    """Evaluate a single entry of hermite_tail_bounds."""
    return float(hermite_tail_bounds(growth, sigma2, order, scale=scale)[order])


def linear_system_growth(
    x0: float, y0: float, a1: float, a2: float, b1: float, b2: float, order: int, /
) -> Array:
    r"""Tabulate the growth bound $\max(|x_0|, |y_0|) M_{AB}^k$ of linear systems.

    Here $M_{AB} = 2 \max(|A_1|, |A_2|, |B_1|, |B_2|)$.
    """
    m_ab = 2 * max(abs(a1), abs(a2), abs(b1), abs(b2))
    return max(abs(x0), abs(y0)) * m_ab ** np.arange(order + 1.0)
