"""Exact quantum bounded-query algorithms on a counted-oracle state-vector simulator."""

from .errors import (
    AdaptivityError,
    BQLabError,
    CapacityError,
    ContractError,
    ExactnessViolation,
    ParseError,
)

__version__ = "0.1.0"
