"""Exception types shared across the package."""


class IsocrError(Exception):
    """Base class for all errors raised by isocr."""


class DimensionError(IsocrError, ValueError):
    """Operand shapes do not fit together."""


class DomainError(IsocrError, ValueError):
    """A scalar parameter lies outside its admissible range."""


class NotHermitianError(IsocrError, ValueError):
    pass


class NotPSDError(IsocrError, ValueError):
    pass


class InvalidStrategyError(IsocrError, ValueError):
    """A measurement strategy violates one of its structural invariants.

    The message always starts with the name of the violated invariant so
    that callers (the CLI in particular) can surface it verbatim.
    """
