"""Discrete Wick calculus for functionals of fractional Brownian motion."""

from wickfbm.backend import config

# All algebra runs in double precision
config.update("jax_enable_x64", True)

try:
    from wickfbm._version import version as __version__
except ImportError:
    __version__ = "unknown"
