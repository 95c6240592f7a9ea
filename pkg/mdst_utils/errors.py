"""
Exception types raised by mdst-utils.

All of them derive from ``ValueError`` so callers that only care about bad
input can keep catching that.
"""


class MdstError(Exception):
    """Base class for every error raised by the library."""


class InvalidDimensionError(MdstError, ValueError):
    """Dimension is zero, or too small for the requested operation."""


class InvalidParameterError(MdstError, ValueError):
    """A numeric parameter or configuration value is out of range."""


class DomainError(MdstError, ValueError):
    """Parameters fall outside the domain where a formula or law is defined."""


class InvalidInputError(MdstError, ValueError):
    """Structurally invalid input, such as mismatched point sets."""


class EmptySampleError(MdstError, ValueError):
    """A statistic was requested on an empty sample."""
