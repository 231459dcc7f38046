"""Exception hierarchy.

Every error derives from :class:`SubmodError` (itself a ``ValueError``) so
callers can catch the whole family, while the harness maps
:class:`InvalidInstance` subclasses to exit code 2.
"""


class SubmodError(ValueError):
    pass


class InvalidInstance(SubmodError):
    """Input data that can never describe a valid problem instance."""


class NegativeValue(InvalidInstance):
    pass


class ElementPresent(SubmodError):
    pass


class BadEdge(InvalidInstance):
    pass


class NegativeWeight(InvalidInstance):
    pass


class BadUniverseId(InvalidInstance):
    pass


class NegativeEntry(InvalidInstance):
    pass


class TooLarge(SubmodError):
    pass


class BadParams(InvalidInstance):
    pass


class NotAMatroid(InvalidInstance):
    pass


class DependentInput(SubmodError):
    pass


class DependentContraction(SubmodError):
    pass


class InternalContradiction(RuntimeError):
    """An outcome a correct oracle can never produce."""


class InfeasibleGround(SubmodError):
    pass


class NotPartition(SubmodError):
    pass


class NoTwoBases(SubmodError):
    pass


class TooManyFractional(SubmodError):
    pass


class BadGrid(SubmodError):
    pass


class KindMismatch(SubmodError):
    pass
