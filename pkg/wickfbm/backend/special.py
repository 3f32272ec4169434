"""Special functions."""

import jax.scipy.special


def gammaln(x, /):
    return jax.scipy.special.gammaln(x)
