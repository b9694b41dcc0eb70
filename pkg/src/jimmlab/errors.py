"""Exception types shared across the package."""


class JimmlabError(Exception):
    """Base class for errors raised by jimmlab."""


class PrecisionError(JimmlabError, ValueError):
    """Input precision is too low to certify the requested output."""


class BudgetExceeded(JimmlabError, RuntimeError):
    """An adaptive search ran out of its step or size budget."""
