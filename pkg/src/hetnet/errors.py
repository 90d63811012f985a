"""Error types shared across the package.

Everything configuration- or argument-shaped derives from ValueError so
callers can catch one base class; the runtime failures that signal a
violated numerical guard derive from RuntimeError.
"""


class MissingParameter(ValueError):
    """A required configuration key is absent."""


class InvalidRange(ValueError):
    """A parameter is outside its admissible range."""


class DomainError(ValueError):
    """A function argument is outside the mathematical domain."""


class PreconditionViolated(ValueError):
    """An operation was called in a regime it does not model."""


class GuardExceeded(RuntimeError):
    """A combinatorial size guard was hit before evaluation started."""


class UnboundedObjective(RuntimeError):
    """The rate objective does not attain a maximum on the search grid."""


class RankDeficient(RuntimeError):
    """The stacked user channels are not linearly independent."""
