"""NumPy-style API.

In here, we loosely follow the Array API:

https://data-apis.org/array-api/2022.12/

But deviate in a few points:
* The functions here do not have all the arguments specified in the API
  (we only wrap the arguments we need)
* We do not use methods on Array types, e.g. shape(), dtype(). Instead,
  these are functions. (Not all backends might always follow this method interface.)
* We do not implement any constants (e.g. NaN, Inf). Instead, these are functions.
* We call max/min/amax/amin array_max and elementwise_max.
  This is more verbose than what the array API suggests.
* Bitwise functions operate on the integer bitmasks of Walsh vectors.

"""

import jax.numpy as jnp

# Creation functions:


def arange(start, /, stop=None, step=1, *, dtype=None):
    return jnp.arange(start, stop, step, dtype=dtype)


def linspace(start, stop, /, *, num, endpoint=True):
    return jnp.linspace(start, stop, num=num, endpoint=endpoint)


def asarray(obj, /, *, dtype=None):
    return jnp.asarray(obj, dtype=dtype)


def eye(n_rows):
    return jnp.eye(n_rows)


def ones_like(x, /):
    return jnp.ones_like(x)


def zeros_like(x, /):
    return jnp.zeros_like(x)


def zeros(shape, *, dtype=None):
    return jnp.zeros(shape, dtype=dtype)


def ones(shape, *, dtype=None):
    return jnp.ones(shape, dtype=dtype)


def full(shape, fill_value, *, dtype=None):
    return jnp.full(shape, fill_value, dtype=dtype)


def concatenate(list_of_arrays, /, axis=0):
    return jnp.concatenate(list_of_arrays, axis=axis)


def stack(list_of_arrays, /, axis=0):
    return jnp.stack(list_of_arrays, axis=axis)


# Element-wise functions


def abs(x, /):  # noqa: A001
    return jnp.abs(x)


def log(x, /):
    return jnp.log(x)


def exp(x, /):
    return jnp.exp(x)


def sqrt(x, /):
    return jnp.sqrt(x)


def sin(x, /):
    return jnp.sin(x)


def cos(x, /):
    return jnp.cos(x)


def isfinite(x, /):
    return jnp.isfinite(x)


def elementwise_max(x1, x2, /):
    return jnp.maximum(x1, x2)


def elementwise_min(x1, x2, /):
    return jnp.minimum(x1, x2)


# Bitwise functions


def bitwise_and(x1, x2, /):
    return jnp.bitwise_and(x1, x2)


def bitwise_or(x1, x2, /):
    return jnp.bitwise_or(x1, x2)


def bitwise_xor(x1, x2, /):
    return jnp.bitwise_xor(x1, x2)


def left_shift(x1, x2, /):
    return jnp.left_shift(x1, x2)


# Utility functions


def any(x, /):  # noqa: A001
    return jnp.any(x)


def all(x, /):  # noqa: A001
    return jnp.all(x)


def allclose(x1, x2, /, *, rtol=1e-5, atol=1e-8):
    return jnp.allclose(x1, x2, rtol=rtol, atol=atol)


# Statistical functions


def mean(x, /, axis=None):
    return jnp.mean(x, axis)


def var(x, /, axis=None, *, ddof=0):
    return jnp.var(x, axis, ddof=ddof)


def sum(x, /, axis=None):  # noqa: A001
    return jnp.sum(x, axis)


def prod(x, /, axis=None):
    return jnp.prod(x, axis)


def cumsum(x, /, axis=None):
    return jnp.cumsum(x, axis)


def cumprod(x, /, axis=None):
    return jnp.cumprod(x, axis)


def array_max(x, /, axis=None):
    return jnp.amax(x, axis)


# Searching functions


def where(condition, x1, x2, /):
    return jnp.where(condition, x1, x2)


def nonzero(x, /):
    return jnp.nonzero(x)


# Manipulation functions


def reshape(x, /, shape):
    return jnp.reshape(x, shape)


def flip(x, /):
    return jnp.flip(x)


def pad(x, /, pad_width):
    return jnp.pad(x, pad_width)


# Functional implementation of what are usually array-methods


def shape(x, /):
    return jnp.shape(x)


def dtype(x, /):
    return jnp.dtype(x)


# Functional implementation of constants


def nan():
    return jnp.nan


def inf():
    return jnp.inf


def finfo_eps(x, /):
    return jnp.finfo(x).eps


# Others


def tril_indices(n, /, offset=0):
    return jnp.tril_indices(n, offset)
