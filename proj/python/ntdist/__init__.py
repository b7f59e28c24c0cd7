"""Distribution experiments for d(n) and for the coefficients of the weight-12 cusp form."""

from ._ntdist import *  # noqa: F401,F403
from ._ntdist import (
    AccuracyError,
    CapacityError,
    DivisorTable,
    DomainError,
    Error,
    FitError,
    HeckeTable,
    UnsupportedError,
    run_cli,
)

__all__ = [
    "AccuracyError",
    "CapacityError",
    "DivisorTable",
    "DomainError",
    "Error",
    "FitError",
    "HeckeTable",
    "UnsupportedError",
    "run_cli",
]
