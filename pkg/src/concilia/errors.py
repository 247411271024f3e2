"""Exception hierarchy shared by every module."""


class ConciliaError(Exception):
    """Base class for all errors raised by this package."""


# topology
class SpaceError(ConciliaError):
    pass


class MissingEmptyOrFull(SpaceError):
    pass


class NotClosedUnderUnion(SpaceError):
    def __init__(self, msg, pair=None):
        super().__init__(msg)
        self.pair = pair


class NotClosedUnderIntersection(SpaceError):
    def __init__(self, msg, pair=None):
        super().__init__(msg)
        self.pair = pair


class UnknownPoint(SpaceError):
    pass


class NotClosed(SpaceError):
    pass


class NotOpen(SpaceError):
    pass


class TooLarge(SpaceError):
    pass


# logic
class LogicError(ConciliaError):
    pass


class NotInZFamily(LogicError):
    pass


class UnboundAtom(LogicError):
    pass


class ModeMismatch(LogicError):
    pass


# conciliations
class ConciliationError(ConciliaError):
    pass


class MissingCarrier(ConciliationError):
    pass


class MissingEdge(ConciliationError):
    pass


class IdentityViolated(ConciliationError):
    pass


class PathDependence(ConciliationError):
    def __init__(self, msg, paths=None):
        super().__init__(msg)
        self.paths = paths


class EmptyCarrier(ConciliationError):
    pass


class NotMatching(ConciliationError):
    def __init__(self, msg, pair=None):
        super().__init__(msg)
        self.pair = pair


class NoGlue(ConciliationError):
    pass


class AmbiguousGlue(ConciliationError):
    pass


class NotSubobject(ConciliationError):
    pass


class NotClassifiable(ConciliationError):
    pass


class ShapeError(ConciliationError):
    """A linear map whose matrix does not fit the carrier dimensions."""


# cohomology
class DuplicateMember(ConciliaError):
    pass


# duality
class LatticeError(ConciliaError):
    pass


class MonoidMissing(LatticeError):
    pass
