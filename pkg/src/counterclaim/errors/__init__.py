"""
Exception root shared by every counterclaim subpackage.
"""

from .base_errors import BackendError, CounterclaimError, DataError, UsageError

__all__ = [
    "CounterclaimError",
    "UsageError",
    "DataError",
    "BackendError",
]
