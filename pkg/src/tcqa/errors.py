"""Shared exception base for data and validation errors."""


class TcqaError(Exception):
    """Base class for all validation errors raised by this package.

    The CLI maps any TcqaError to exit code 2 (data-validation error).
    """
