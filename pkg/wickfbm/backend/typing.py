"""Types."""

# fmt: off
from collections.abc import Callable, Iterator  # noqa: F401
from typing import (  # noqa: F401, UP035
    Optional,
    Sequence,
    Tuple,
    Union,
)

from jax import Array  # noqa: F401

# fmt: on
