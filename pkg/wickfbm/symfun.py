r"""Wick powers and Wick analytic functionals via elementary symmetric polynomials.

Along a fixed path $\xi \in \{-1, +1\}^n$ the discrete Wick power of the
random walk has the closed form

$$
(B^{H,n}_t)^{\diamond k} = k! \, e_k(b_{t,1} \xi_1, ..., b_{t,m} \xi_m),
\quad m = \lfloor n t \rfloor,
$$

where $e_k$ is the elementary symmetric polynomial of degree $k$.
All functions in this module therefore run in $O(m K)$ operations
and do not need the exponential-size Walsh engine.
"""

import logging

from wickfbm import hermite, kernel
from wickfbm.backend import containers, control_flow, func, np, special
from wickfbm.backend.typing import Array, Optional

logger = logging.getLogger(__name__)

# Longer inputs switch to compensated accumulation
COMPENSATION_THRESHOLD = 1000


class ESymTable(containers.NamedTuple):
    """Elementary symmetric polynomials $e_0, ..., e_K$ of a set of values."""

    values: Array
    order: int
    e: Array


def esym(values: Array, order: int, /, *, compensated: Optional[bool] = None):
    r"""Compute $e_0(v), ..., e_K(v)$ with the one-pass recursion.

    Processing one value $v$ updates $e_k \leftarrow e_k + v e_{k-1}$
    for all $k$ simultaneously. Entries with $k$ above the number of values
    are exactly zero.

    With ``compensated=True`` (the default for more than
    ``COMPENSATION_THRESHOLD`` values), every update is accumulated
    with Neumaier summation.
    """
    if order < 0:
        msg = f"The order must be non-negative; received order={order}."
        raise ValueError(msg)
    values = np.asarray(values, dtype=float)
    if np.shape(values)[0] == 0:
        return ESymTable(values, order, _esym_init(order))
    if compensated is None:
        compensated = np.shape(values)[0] > COMPENSATION_THRESHOLD
        if compensated:
            logger.debug("esym: compensated sums for %d values", np.shape(values)[0])
    e = esym_array(values, order, compensated=compensated)
    return ESymTable(values, order, e)


def esym_array(values: Array, order: int, /, *, compensated: bool = False) -> Array:
    """Compute the array of esym values; traceable under vmap and jit."""
    if compensated:
        return _esym_compensated(values, order)
    return _esym_plain(values, order)


def _esym_init(order):
    return np.zeros((order + 1,)).at[0].set(1.0)


def _shift(e):
    return np.concatenate([np.zeros((1,)), e[:-1]])


def _esym_plain(values, order):
    def step(e, v):
        return e + v * _shift(e), None

    e, _ = control_flow.scan(step, _esym_init(order), xs=values)
    return e


def _esym_compensated(values, order):
    def step(carry, v):
        total, compensation = carry
        increment = v * _shift(total + compensation)
        updated = total + increment
        error = np.where(
            np.abs(total) >= np.abs(increment),
            (total - updated) + increment,
            (increment - updated) + total,
        )
        return (updated, compensation + error), None

    init = (_esym_init(order), np.zeros((order + 1,)))
    (total, compensation), _ = control_flow.scan(step, init, xs=values)
    return total + compensation


def _times_factorial(value, k, *, power=1):
    # (k!)^power overflows long before the product does
    log_factor = power * special.gammaln(k + 1.0)
    magnitude = np.abs(value)
    safe = np.where(magnitude > 0, magnitude, 1.0)
    scaled = np.exp(np.log(safe) + log_factor)
    return np.where(magnitude > 0, np.where(value < 0, -scaled, scaled), 0.0)


def _check_path(grid, signs):
    signs = np.asarray(signs, dtype=float)
    if np.shape(signs)[-1] != grid.n:
        msg = f"Expected paths of length {grid.n}; received shape {np.shape(signs)}."
        raise ValueError(msg)
    return signs


def wick_power_path(grid: kernel.KernelGrid, t: float, k: int, signs: Array, /):
    r"""Evaluate $(B^{H,n}_t)^{\diamond k}$ along one path of signs."""
    signs = _check_path(grid, signs)
    m = kernel.lattice_index(grid.n, t)
    if k > m:
        return 0.0
    e = esym(grid.b[m, :m] * signs[:m], k).e
    return float(_times_factorial(e[k], k))


def wick_power_inner(grid: kernel.KernelGrid, t: float, s: float, N: int, /):
    r"""Compute $\mathbb{E}[(B^{H,n}_t)^{\diamond N} (B^{H,n}_s)^{\diamond N}]$.

    Equals $(N!)^2 e_N(b_{t,1} b_{s,1}, ..., b_{t,m} b_{s,m})$
    with $m = \lfloor n \min(t, s) \rfloor$.
    """
    l_t = kernel.lattice_index(grid.n, t)
    l_s = kernel.lattice_index(grid.n, s)
    m = min(l_t, l_s)
    if N > m:
        return 0.0
    e = esym(grid.b[l_t, :m] * grid.b[l_s, :m], N).e
    return float(_times_factorial(e[N], N, power=2))


def wick_power_difference_norm(grid: kernel.KernelGrid, t: float, s: float, N: int, /):
    r"""Compute $\frac{1}{N!} \mathbb{E}[((B_t)^{\diamond N} - (B_s)^{\diamond N})^2]$.

    The normalisation matches the increment bound $8^N |t - s|^{2H}$.
    """
    table = _inner_tables(grid, t, s, N)
    difference = table.tt[N] + table.ss[N] - 2 * table.ts[N]
    return float(_times_factorial(difference, N))


class _InnerTables(containers.NamedTuple):
    tt: Array
    ss: Array
    ts: Array


def _inner_tables(grid, t, s, order):
    l_t = kernel.lattice_index(grid.n, t)
    l_s = kernel.lattice_index(grid.n, s)
    m = min(l_t, l_s)
    row_t = grid.b[l_t, :l_t]
    row_s = grid.b[l_s, :l_s]
    return _InnerTables(
        tt=esym(row_t * row_t, order).e,
        ss=esym(row_s * row_s, order).e,
        ts=esym(grid.b[l_t, :m] * grid.b[l_s, :m], order).e,
    )


def wick_series_path(
    grid: kernel.KernelGrid,
    t: float,
    coeffs: hermite.SeriesCoeffs,
    signs: Array,
    /,
    order: Optional[int] = None,
) -> float:
    r"""Evaluate $F^n_t = \sum_k \frac{a_k}{k!} (B^{H,n}_t)^{\diamond k}$ along a path.

    The sum equals $\sum_k a_k e_k(b_t \xi)$ and terminates at
    $k = \lfloor n t \rfloor$; a smaller ``order`` truncates it further.
    """
    signs = _check_path(grid, signs)
    m = kernel.lattice_index(grid.n, t)
    order = m if order is None else min(order, m)
    a = hermite.coefficients(coeffs, order)
    e = esym(grid.b[m, :m] * signs[:m], order).e
    return float(a @ e)


def wick_series_paths(
    grid: kernel.KernelGrid,
    t: float,
    coeffs: hermite.SeriesCoeffs,
    signs: Array,
    /,
    order: Optional[int] = None,
) -> Array:
    """Evaluate wick_series_path for a batch of paths with shape (count, n)."""
    signs = _check_path(grid, signs)
    m = kernel.lattice_index(grid.n, t)
    order = m if order is None else min(order, m)
    a = hermite.coefficients(coeffs, order)
    row = grid.b[m, :m]
    compensated = m > COMPENSATION_THRESHOLD

    def single(path):
        return a @ esym_array(row * path[:m], order, compensated=compensated)

    return func.vmap(single)(signs)


def wick_series_increment_norm(
    grid: kernel.KernelGrid, coeffs: hermite.SeriesCoeffs, t: float, s: float, /
) -> float:
    r"""Compute $\mathbb{E}[(F^n_t - F^n_s)^2]$ exactly.

    By orthogonality of the chaos components,
    $\mathbb{E}[(F_t - F_s)^2] = \sum_k a_k^2 (e_k^{tt} + e_k^{ss} - 2 e_k^{ts})$,
    where $e_k^{ts} = e_k(b_{t,i} b_{s,i})$.
    """
    order = max(kernel.lattice_index(grid.n, t), kernel.lattice_index(grid.n, s))
    a = hermite.coefficients(coeffs, order)
    table = _inner_tables(grid, t, s, order)
    return float(np.sum(a**2 * (table.tt + table.ss - 2 * table.ts)))


def wick_series_norm(
    grid: kernel.KernelGrid, coeffs: hermite.SeriesCoeffs, t: float, /
) -> float:
    r"""Compute $\mathbb{E}[(F^n_t)^2] = \sum_k a_k^2 e_k(b_{t,i}^2)$."""
    m = kernel.lattice_index(grid.n, t)
    a = hermite.coefficients(coeffs, m)
    row = grid.b[m, :m]
    return float(np.sum(a**2 * esym(row * row, m).e))
