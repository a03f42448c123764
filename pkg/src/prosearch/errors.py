"""Shared exception types."""


class NumericFailure(RuntimeError):
    """A numeric computation produced non-finite values or an unsolvable system."""
