"""Control flow."""

import jax

# API follows JAX, but we liberally work with positional- and keyword-only arguments
# We also rename some arguments for improved consistency:
# For example, we always use 'body_fun' and 'init_val',
#  even though jax.lax.scan uses 'f' and 'init'.


def scan(body_fun, init_val, /, xs, *, reverse=False, length=None):
    return jax.lax.scan(body_fun, init=init_val, xs=xs, reverse=reverse, length=length)


def map(body_fun, /, xs):  # noqa: A001
    return jax.lax.map(body_fun, xs)
