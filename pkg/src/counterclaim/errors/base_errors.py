"""
Root exceptions for counterclaim.

Every exception raised on purpose by the package derives from
CounterclaimError. The three families below decide how the CLI exits and which
HTTP status the service answers with, so module-specific exceptions always
subclass one of them instead of CounterclaimError directly.

Usage:
    from counterclaim.errors import DataError

    try:
        corpus = ingest(records)
    except DataError as e:
        log.error(e.message)
        return e.exit_code
"""


class CounterclaimError(Exception):
    """
    Base exception class for all counterclaim errors.

    Attributes:
        message (str): The error message.
        exit_code (int): Process exit code used by the CLI.
        error_code (str): Machine-readable code used by the HTTP service.
    """

    exit_code = 1
    error_code = "counterclaim_error"

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)


class UsageError(CounterclaimError):
    """
    Raised when the caller asked for something invalid.

    Bad arguments, bad configuration, or a command that cannot run in the
    current state of the artifact directory.

    Example:
        >>> raise UsageError("k must be at least 1")
    """

    exit_code = 1
    error_code = "usage_error"


class DataError(CounterclaimError):
    """
    Raised when input data or stored artifacts are unusable.

    Example:
        >>> raise DataError("gold evidence missing from corpus")
    """

    exit_code = 2
    error_code = "data_error"


class BackendError(CounterclaimError):
    """
    Raised when the external generation backend fails.

    Example:
        >>> raise BackendError("backend returned HTTP 503")
    """

    exit_code = 3
    error_code = "backend_error"
