"""Exceptions raised by primewalk"""

from typing import Any, Optional


class PrimeWalkError(Exception):
    """Base class for all primewalk errors"""


class ConfigurationError(PrimeWalkError, ValueError):
    """Invalid parameters for a sieve, walk or statistic"""


class EmptyInputError(PrimeWalkError, ValueError):
    """An operation received no values or an empty grid"""


class AlignmentError(PrimeWalkError, ValueError):
    """Snapshot series do not share the same n values"""


class CheckpointError(PrimeWalkError):
    """Checkpoint bytes are corrupted, truncated or from another format version"""


class SchemaError(PrimeWalkError):
    """A CSV file does not match the expected schema"""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field


class FitError(PrimeWalkError):
    """A fit could not be computed.

    The data gathered before fitting is still available on ``.result`` so that it can
    be exported.
    """

    def __init__(self, message: str, result: Any = None):
        super().__init__(message)
        self.result = result
