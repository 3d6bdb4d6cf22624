"""Exception hierarchy shared by all engines."""


class AmalgamError(Exception):
    """Base class for every error raised by this package."""


class MalformedDiagram(AmalgamError):
    pass


class KindMismatch(AmalgamError):
    pass


class BoundTooSmall(AmalgamError):
    pass


class ConstantMoved(AmalgamError):
    pass


class InsufficientDomain(AmalgamError):
    pass


class LabelMissing(AmalgamError):
    pass


class CatalogCoverage(AmalgamError):
    """The requested bound exceeds what the group catalog can enumerate exhaustively."""


class GroupAxiomError(AmalgamError):
    pass


class NotAssociative(GroupAxiomError):
    def __init__(self, i, j, k):
        super().__init__(f"associativity fails at ({i}, {j}, {k})")
        self.triple = (i, j, k)


class NoUnit(GroupAxiomError):
    pass


class NoInverse(GroupAxiomError):
    def __init__(self, i):
        super().__init__(f"element {i} has no inverse")
        self.element = i


class NotAHomomorphism(AmalgamError):
    pass


class NotNormal(AmalgamError):
    pass


class NotSubgroup(AmalgamError):
    pass


class NotInjective(AmalgamError):
    pass


class NotAbelian(AmalgamError):
    pass


class NoFiniteWitness(AmalgamError):
    def __init__(self, message, derivation=None):
        super().__init__(message)
        self.derivation = derivation


class EvenPrime(AmalgamError):
    pass


class WrongVariety(AmalgamError):
    pass


class UnsupportedClass(AmalgamError):
    pass


class IncompatiblePredicates(AmalgamError):
    pass


class TableTooLarge(AmalgamError):
    pass


class PreconditionFailed(AmalgamError):
    pass


class NoCompletionAtBound(AmalgamError):
    pass


class UnsupportedVariety(AmalgamError):
    pass


class NotAGroupPresentation(AmalgamError):
    pass


class BoundExceeded(AmalgamError):
    pass


class StrategyViolation(AmalgamError):
    pass


class CorruptReport(AmalgamError):
    pass
