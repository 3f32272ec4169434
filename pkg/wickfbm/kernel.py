r"""Molchan--Golosov kernel and the coefficient grid of the binary random walk.

The fractional Brownian motion with Hurst parameter $H \in (1/2, 1)$ is
represented as $B^H_t = \int_0^t z(t, s) \, dW_s$ with the kernel

$$
z(t, s) = c_H (H - 1/2) s^{1/2 - H} \int_s^t u^{H-1/2} (u - s)^{H - 3/2} du.
$$

The disturbed binary random walk replaces $dW$ by scaled Bernoulli variables,
which yields the Walsh coefficients

$$
b^n_{t, i} = \sqrt{n} \int_{(i-1)/n}^{i/n} z(\lfloor nt \rfloor / n, s) ds.
$$

All integrals are evaluated with Gauss--Legendre rules after power (and
logarithmic) substitutions that remove the endpoint singularities.
"""

import json
import logging
import math
import pathlib

from wickfbm import quadrature
from wickfbm.backend import containers, control_flow, func, linalg, np, parquet, special
from wickfbm.backend.typing import Array, Optional, Union

logger = logging.getLogger(__name__)

GRID_FORMAT_VERSION = 1

# Upper bound on the number of floats per chunk of cells
_CHUNK_BUDGET = 2**22


class QuadratureError(RuntimeError):
    """Node doubling did not stabilise within the tolerance."""


class GridInvariantError(RuntimeError):
    """A computed grid violates one of its structural invariants."""


class KernelGrid(containers.NamedTuple):
    """Walsh coefficients of the binary random walk for one pair (H, n).

    Row ``l`` of ``b`` holds $b^n_{l/n, i}$ in column ``i - 1``
    (row zero vanishes), and ``d[l] = b[l] - b[l - 1]``.
    Entries with ``i > l`` are zero.
    """

    hurst: float
    n: int
    tol: float
    b: Array
    d: Array
    quad_profile: dict


def hurst_param(value: float, /) -> float:
    """Validate a Hurst parameter in the open interval (1/2, 1)."""
    value = float(value)
    if not 0.5 < value < 1.0:
        msg = f"The Hurst parameter must satisfy 1/2 < H < 1; received H={value}."
        raise ValueError(msg)
    return value


def molchan_golosov_constant(hurst: float, /) -> float:
    r"""Compute the normalising constant $c_H$ of the Molchan--Golosov kernel.

    $$
    c_H = \sqrt{\frac{2H \Gamma(3/2 - H)}{\Gamma(H + 1/2) \Gamma(2 - 2H)}}
    $$
    """
    H = hurst_param(hurst)
    log_ratio = (
        special.gammaln(1.5 - H) - special.gammaln(H + 0.5) - special.gammaln(2 - 2 * H)
    )
    return float(np.sqrt(2 * H * np.exp(log_ratio)))


def fbm_covariance(hurst: float, t: float, s: float, /) -> float:
    r"""Evaluate the covariance $R_H(t, s)$ of fractional Brownian motion.

    Unlike the kernel functions, this accepts any $H \in (0, 1)$;
    for $H = 1/2$ it reduces to $\min(t, s)$.
    """
    if not 0.0 < hurst < 1.0:
        msg = f"The Hurst parameter must lie in (0, 1); received H={hurst}."
        raise ValueError(msg)
    two_h = 2 * hurst
    return 0.5 * (abs(t) ** two_h + abs(s) ** two_h - abs(t - s) ** two_h)


def lattice_index(n: int, t: float, /) -> int:
    r"""Map a time $t \in [0, 1]$ to the lattice index $\lfloor n t \rfloor$.

    A guard of ``1e-9`` absorbs round-off in decimal inputs such as ``0.3 * 10``.
    """
    if not 0.0 <= t <= 1.0:
        msg = f"Times must lie in [0, 1]; received t={t}."
        raise ValueError(msg)
    return min(n, math.floor(n * t + 1e-9))


def kernel_z(
    hurst: float,
    t: float,
    s: float,
    /,
    *,
    tol: float = 1e-12,
    initial_nodes: int = 16,
    max_nodes: int = 1024,
) -> float:
    """Evaluate the Molchan--Golosov kernel $z_H(t, s)$.

    Parameters
    ----------
    hurst
        Hurst parameter in (1/2, 1).
    t
        First argument in [0, 1].
    s
        Second argument, strictly positive.
    tol
        Relative tolerance of the node-doubling loop.
    initial_nodes
        Number of Gauss--Legendre nodes in the first pass.
    max_nodes
        Largest admissible number of nodes.

    Returns
    -------
    float
        The kernel value; zero if ``s >= t``.

    Raises
    ------
    ValueError
        If ``s <= 0`` or the Hurst parameter is invalid.
    QuadratureError
        If doubling the nodes does not stabilise the value.
    """
    H = hurst_param(hurst)
    if s <= 0:
        msg = f"The kernel requires s > 0; received s={s}."
        raise ValueError(msg)
    if not 0.0 <= t <= 1.0:
        msg = f"Times must lie in [0, 1]; received t={t}."
        raise ValueError(msg)
    if s >= t:
        return 0.0

    c_H = molchan_golosov_constant(H)
    order = initial_nodes
    previous = _kernel_z_rule(H, t, s, order=order, constant=c_H)
    while 2 * order <= max_nodes:
        order *= 2
        current = _kernel_z_rule(H, t, s, order=order, constant=c_H)
        if abs(current - previous) <= tol * abs(current):
            return current
        previous = current

    msg = (
        f"Kernel quadrature did not reach rel. tol {tol} "
        f"with {max_nodes} nodes (H={H}, t={t}, s={s})."
    )
    raise QuadratureError(msg)


def _kernel_z_rule(hurst, t, s, *, order, constant):
    alpha = hurst - 0.5
    nodes, weights = quadrature.gauss_legendre(order)
    inner = _inner_integral(np.asarray(t), np.asarray(s), nodes, weights, alpha)
    return float(constant * s ** (-alpha) * inner)


def _inner_integral(t, s, nodes, weights, alpha):
    """Compute alpha * int_s^t u^alpha (u - s)^(alpha - 1) du.

    The range is split at u = 2s. Below, u = s + v^(1/alpha) turns the
    endpoint singularity into a bounded integrand. Above, the map
    u = 2s (t / 2s)^y resolves the scales between s and t.
    The result vanishes for s >= t.
    """
    t = t[..., None]
    s = s[..., None]
    q = 1.0 / alpha

    span = np.elementwise_max(np.elementwise_min(t, 2 * s) - s, 0.0)
    integrand = (s + span * nodes**q) ** alpha
    lower = span[..., 0] ** alpha * np.sum(weights * integrand, axis=-1)

    log_ratio = np.log(np.elementwise_max(t / (2 * s), 1.0))
    u = 2 * s * np.exp(log_ratio * nodes)
    integrand = u ** (alpha + 1) * (u - s) ** (alpha - 1)
    upper = alpha * log_ratio[..., 0] * np.sum(weights * integrand, axis=-1)
    return lower + upper


def build_grid(
    hurst: float,
    n: int,
    tol: float = 1e-9,
    /,
    *,
    cache_dir: Optional[Union[str, pathlib.Path]] = None,
    initial_nodes: int = 16,
    max_nodes: int = 512,
    grading: float = 4.0,
) -> KernelGrid:
    r"""Build the coefficient grid $b^n_{l/n, i}$, $d^n_{l, i}$.

    Each cell $[(i-1)/n, i/n]$ is split into two halves.
    The lower half of the first cell substitutes
    $s = w^{\gamma / (3/2 - H)}$ with grading exponent $\gamma$
    (``grading``; $\gamma = 1$ absorbs the $s^{1/2 - H}$ singularity exactly,
    larger values also smooth the remaining integrand).
    The upper half of a diagonal cell ($i = l$) substitutes
    $t - s = (t - a) x^{1/(H - 1/2)}$.
    Inner and outer node counts double until every coefficient changes by
    less than ``tol`` (relative).

    Parameters
    ----------
    hurst
        Hurst parameter in (1/2, 1).
    n
        Number of time steps on [0, 1].
    tol
        Relative tolerance per coefficient.
    cache_dir
        Optional directory. Grids are read from and written to
        ``cache_dir / grid_filename(hurst, n, tol)``.
    initial_nodes
        Nodes per half-cell and inner piece in the first pass.
    max_nodes
        Largest admissible node count.
    grading
        Grading exponent of the substitution in the first cell.

    Raises
    ------
    QuadratureError
        If the doubling loop does not converge.
    GridInvariantError
        If the converged grid violates nonnegativity, the coefficient bound,
        or the increment bound beyond ``tol``.
    """
    H = hurst_param(hurst)
    if n < 1:
        msg = f"The number of steps must be positive; received n={n}."
        raise ValueError(msg)
    if tol <= 0:
        msg = f"The tolerance must be positive; received tol={tol}."
        raise ValueError(msg)

    if cache_dir is not None:
        path = pathlib.Path(cache_dir) / grid_filename(H, n, tol)
        if path.exists():
            logger.info("Loading cached grid from %s", path)
            return load_grid(path)

    order = initial_nodes
    previous = _grid_coefficients(H, n, order=order, grading=grading)
    while True:
        if 2 * order > max_nodes:
            msg = (
                f"Grid quadrature did not reach rel. tol {tol} with "
                f"{max_nodes} nodes (H={H}, n={n})."
            )
            raise QuadratureError(msg)
        order *= 2
        current = _grid_coefficients(H, n, order=order, grading=grading)
        change = _max_relative_change(previous, current)
        logger.debug("Grid H=%s n=%d: %d nodes, rel. change %.3e", H, n, order, change)
        if change <= tol:
            break
        previous = current

    b = current
    d = b - np.concatenate([np.zeros((1, n)), b[:-1]])
    profile = {
        "method": "gauss-legendre with power substitutions",
        "initial_nodes": initial_nodes,
        "outer_nodes": order,
        "inner_nodes": order,
        "grading": grading,
        "max_relative_change": float(change),
        "format_version": GRID_FORMAT_VERSION,
    }
    grid = KernelGrid(hurst=H, n=n, tol=tol, b=b, d=d, quad_profile=profile)
    verify_grid(grid)
    logger.info("Built grid H=%s n=%d with %d nodes per piece", H, n, order)

    if cache_dir is not None:
        pathlib.Path(cache_dir).mkdir(parents=True, exist_ok=True)
        save_grid(grid, path)
    return grid


def _max_relative_change(old, new):
    scale = np.elementwise_max(np.abs(new), np.finfo_eps(new.dtype))
    support = new > 0
    change = np.where(support, np.abs(new - old) / scale, 0.0)
    return float(np.array_max(change))


def _grid_coefficients(hurst, n, *, order, grading):
    alpha = hurst - 0.5
    c_H = molchan_golosov_constant(hurst)
    nodes, weights = quadrature.gauss_legendre(order)

    rows, cols = np.tril_indices(n)
    num_cells = rows.shape[0]
    chunk = max(1, min(num_cells, _CHUNK_BUDGET // (2 * order * order)))
    num_chunks = -(-num_cells // chunk)
    padding = num_chunks * chunk - num_cells

    # Padding repeats the first cell; it is discarded below
    ls = np.reshape(np.pad(rows + 1, (0, padding)), (num_chunks, chunk))
    is_ = np.reshape(np.pad(cols + 1, (0, padding)), (num_chunks, chunk))
    ls = np.where(ls == 0, 1, ls)
    is_ = np.where(is_ == 0, 1, is_)

    def cell(l, i):
        return _cell_integral(l, i, n, nodes, weights, alpha=alpha, grading=grading)

    values = control_flow.map(lambda li: func.vmap(cell)(*li), xs=(ls, is_))
    values = np.reshape(values, (-1,))[:num_cells]
    values = c_H * np.sqrt(n) * values

    b = np.zeros((n + 1, n))
    return b.at[rows + 1, cols].set(values)


def _cell_integral(l, i, n, nodes, weights, *, alpha, grading):
    """Integrate s^(-alpha) times the inner integral over one cell."""
    t = l / n
    a = (i - 1) / n
    b = i / n
    mid = (a + b) / 2

    # Lower half: graded substitution on the first cell
    p = grading / (1 - alpha)
    s_graded = mid * nodes**p
    f_graded = mid ** (1 - alpha) * p * nodes ** (grading - 1) * weights
    s_plain = a + (mid - a) * nodes
    f_plain = (mid - a) * s_plain ** (-alpha) * weights
    first = i == 1
    s_lower = np.where(first, s_graded, s_plain)
    f_lower = np.where(first, f_graded, f_plain)

    # Upper half: substitution towards t on the diagonal
    q = 1 / alpha
    s_subst = t - (t - mid) * nodes**q
    f_subst = (t - mid) * q * nodes ** (q - 1) * s_subst ** (-alpha) * weights
    s_plain = mid + (b - mid) * nodes
    f_plain = (b - mid) * s_plain ** (-alpha) * weights
    diagonal = i == l
    s_upper = np.where(diagonal, s_subst, s_plain)
    f_upper = np.where(diagonal, f_subst, f_plain)

    s = np.concatenate([s_lower, s_upper])
    f = np.concatenate([f_lower, f_upper])
    inner = _inner_integral(np.full(s.shape, t), s, nodes, weights, alpha)
    return np.sum(f * inner)


def verify_grid(grid: KernelGrid, /) -> None:
    r"""Check the structural invariants of a grid; raise if one fails.

    Checks finiteness, nonnegativity of ``b`` and ``d``, the coefficient
    bound $b \le 2 c_H n^{-(1-H)}$, and the increment bound
    $\sum_i (b_{l,i} - b_{m,i})^2 \le |l/n - m/n|^{2H} + tol$ for all pairs.
    """
    H, n, tol, b, d = grid.hurst, grid.n, grid.tol, grid.b, grid.d
    if not bool(np.all(np.isfinite(b))):
        msg = f"The grid (H={H}, n={n}) contains non-finite coefficients."
        raise GridInvariantError(msg)

    if bool(np.any(b < 0)) or bool(np.any(d < -tol * b)):
        msg = f"The grid (H={H}, n={n}) has negative coefficients or increments."
        raise GridInvariantError(msg)

    bound = 2 * molchan_golosov_constant(H) * n ** (H - 1)
    largest = float(np.array_max(b))
    if largest > bound * (1 + tol):
        msg = (
            f"The grid (H={H}, n={n}) violates the coefficient bound: "
            f"max b = {largest} > {bound}."
        )
        raise GridInvariantError(msg)

    gram = b @ b.T
    norms = linalg.diagonal(gram)
    increments = norms[:, None] + norms[None, :] - 2 * gram
    lags = np.abs(np.arange(n + 1)[:, None] - np.arange(n + 1)[None, :]) / n
    excess = float(np.array_max(increments - lags ** (2 * H)))
    if excess > tol:
        msg = (
            f"The grid (H={H}, n={n}) violates the increment bound "
            f"by {excess:.3e} (tol={tol})."
        )
        raise GridInvariantError(msg)


def grid_row(grid: KernelGrid, t: float, /) -> Array:
    r"""Return the coefficient vector $(b^n_{t, i})_{i=1}^n$ (zero-padded)."""
    return grid.b[lattice_index(grid.n, t)]


def discrete_covariance(grid: KernelGrid, t: float, s: float, /) -> float:
    r"""Compute $\mathbb{E}[B^{H,n}_t B^{H,n}_s] = \sum_i b_{t,i} b_{s,i}$.

    The sum runs over $i \le \lfloor n \min(t, s) \rfloor$ only.
    """
    l_t = lattice_index(grid.n, t)
    l_s = lattice_index(grid.n, s)
    m = min(l_t, l_s)
    return float(np.sum(grid.b[l_t, :m] * grid.b[l_s, :m]))


def grid_filename(hurst: float, n: int, tol: float, /) -> str:
    """Name of the cache file for a grid."""
    return f"grid_H{hurst!r}_n{n}_tol{tol!r}.parquet"


def save_grid(grid: KernelGrid, path: Union[str, pathlib.Path], /) -> None:
    """Write the triangular part of a grid to a Parquet file.

    Header fields live in the schema metadata; floats are stored as ``repr``
    strings so that a round trip is bit-exact.
    """
    rows, cols = np.tril_indices(grid.n)
    columns = {
        "l": rows + 1,
        "i": cols + 1,
        "b": grid.b[rows + 1, cols],
        "d": grid.d[rows + 1, cols],
    }
    metadata = {
        "hurst": repr(grid.hurst),
        "n": str(grid.n),
        "tol": repr(grid.tol),
        "quad_profile": json.dumps(grid.quad_profile, sort_keys=True),
        "format_version": str(GRID_FORMAT_VERSION),
    }
    parquet.write_table(columns, str(path), metadata=metadata)
    logger.info("Saved grid to %s", path)


def load_grid(path: Union[str, pathlib.Path], /) -> KernelGrid:
    """Read a grid written by [save_grid][wickfbm.kernel.save_grid]."""
    columns, metadata = parquet.read_table(str(path))
    version = int(metadata.get("format_version", -1))
    if version != GRID_FORMAT_VERSION:
        msg = f"Unsupported grid format version {version} in {path}."
        raise ValueError(msg)

    n = int(metadata["n"])
    rows = np.asarray(columns["l"])
    cols = np.asarray(columns["i"]) - 1
    b = np.zeros((n + 1, n)).at[rows, cols].set(np.asarray(columns["b"]))
    d = np.zeros((n + 1, n)).at[rows, cols].set(np.asarray(columns["d"]))
    return KernelGrid(
        hurst=float(metadata["hurst"]),
        n=n,
        tol=float(metadata["tol"]),
        b=b,
        d=d,
        quad_profile=json.loads(metadata["quad_profile"]),
    )
