"""Pseudo-random-number utilities.

All generators are counter-based: a key is a pure function of its seed,
and ``fold_in`` derives independent sub-streams from integer counters.
"""

import jax.random


def prng_key(seed):
    return jax.random.PRNGKey(seed=seed)


def fold_in(key, data, /):
    return jax.random.fold_in(key, data)


def normal(key, *, shape, dtype=None):
    if dtype is None:
        return jax.random.normal(key, shape=shape)
    return jax.random.normal(key, shape=shape, dtype=dtype)


def uniform(key, *, shape, dtype=None, minval=0.0, maxval=1.0):
    if dtype is None:
        return jax.random.uniform(key, shape=shape, minval=minval, maxval=maxval)
    return jax.random.uniform(
        key, shape=shape, dtype=dtype, minval=minval, maxval=maxval
    )


def rademacher(key, *, shape, dtype=None):
    if dtype is None:
        return jax.random.rademacher(key, shape=shape)
    return jax.random.rademacher(key, shape=shape, dtype=dtype)
