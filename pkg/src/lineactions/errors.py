"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: PreconditionError -> 2,
InconclusiveError -> 3, PropertyViolationError -> 4.
"""


class LineActionsError(Exception):
    pass


class PreconditionError(LineActionsError):
    """Input violates a documented precondition."""


class RepresentationError(PreconditionError):
    """A map value object violates its invariants (non-monotone, wrong degree, ...)."""


class ConstructionError(LineActionsError):
    """An internal construction produced an object failing its own checks."""


class InconclusiveError(LineActionsError):
    """A rigorous decision could not be made (enclosure straddles a boundary)."""


class PropertyViolationError(LineActionsError):
    """A verified property failed (oracle disagreement, inclusion Outside, ...)."""
