r"""Gauss quadrature rules.

Nodes and weights are the eigen-decomposition of the symmetric tridiagonal
Jacobi matrix of the orthogonal polynomial family (Golub--Welsch):
the eigenvalues are the nodes, and the squared first components of the
normalised eigenvectors times the total mass are the weights.
"""

from wickfbm.backend import func, linalg, np
from wickfbm.backend.typing import Array


@func.cache
def gauss_legendre(order: int, /) -> tuple[Array, Array]:
    """Compute the Gauss--Legendre rule on the unit interval $[0, 1]$.

    The rule is exact for polynomials of degree up to ``2 * order - 1``.
    Results are cached per order.
    """
    _check_order(order)
    k = np.arange(1.0, order)
    offdiag = k / np.sqrt(4.0 * k**2 - 1.0)
    nodes, weights = _golub_welsch(np.zeros((order,)), offdiag, mass=2.0)
    return (nodes + 1.0) / 2.0, weights / 2.0


@func.cache
def _gauss_hermite_standard(order):
    k = np.arange(1.0, order)
    return _golub_welsch(np.zeros((order,)), np.sqrt(k), mass=1.0)


def gauss_hermite(order: int, /, sigma2: float = 1.0) -> tuple[Array, Array]:
    r"""Compute the Gauss--Hermite rule for the measure $N(0, \sigma^2)$.

    The weights sum to one, so that ``weights @ f(nodes)`` approximates
    $\mathbb{E}[f(X)]$ for $X \sim N(0, \sigma^2)$.
    """
    _check_order(order)
    if sigma2 < 0:
        msg = f"The variance must be nonnegative; received sigma2={sigma2}."
        raise ValueError(msg)
    nodes, weights = _gauss_hermite_standard(order)
    return np.sqrt(sigma2) * nodes, weights


def _golub_welsch(diag, offdiag, *, mass):
    jacobi = linalg.diagonal_matrix(diag)
    jacobi += linalg.diagonal_matrix(offdiag, offset=1)
    jacobi += linalg.diagonal_matrix(offdiag, offset=-1)
    nodes, eigvecs = linalg.eigh(jacobi)
    weights = mass * eigvecs[0, :] ** 2
    return nodes, weights


def _check_order(order):
    if order < 1:
        msg = f"A quadrature rule needs at least one node; received order={order}."
        raise ValueError(msg)
