"""Container types for grids, recursion states, and results."""

from typing import NamedTuple  # noqa: F401
