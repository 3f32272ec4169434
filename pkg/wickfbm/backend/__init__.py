"""Backend of wickfbm: thin wrappers around JAX, SciPy, and PyArrow."""
