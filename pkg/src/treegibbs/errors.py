"""Exception hierarchy shared by all treegibbs modules."""


class TreeGibbsError(Exception):
    """Base class for all errors raised by this package."""


class InvalidModelError(TreeGibbsError, ValueError):
    """The energy model is malformed (D < 2, wrong length, non-finite entries)."""


class DomainError(TreeGibbsError, ValueError):
    """An argument lies outside the operation's domain."""


class EmptySupportError(DomainError):
    """A projection or conditional distribution has no valid support."""


class ResourceLimitError(TreeGibbsError):
    """A configured enumeration / truncation budget would be exceeded."""


class CheckFailureError(TreeGibbsError):
    """A verification command's statistic violated its threshold (CLI exit 4)."""
