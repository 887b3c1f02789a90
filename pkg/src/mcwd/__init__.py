"""Rigorous checks for entire functions with multiply connected wandering domains.

Magnitudes such as ``10**(10**372)`` are handled through their logarithms in
an extended-exponent interval type (:mod:`mcwd.xlog`).
"""

__version__ = "0.1.0"

from .verdict import BELOW_THRESHOLD, FAIL, INCONCLUSIVE, PASS, CheckVerdict  # noqa: E402
from .xlog import DomainError, XInterval, XReal, iv, working_precision  # noqa: E402

__all__ = [
    "__version__",
    "PASS",
    "FAIL",
    "INCONCLUSIVE",
    "BELOW_THRESHOLD",
    "CheckVerdict",
    "DomainError",
    "XInterval",
    "XReal",
    "iv",
    "working_precision",
]
