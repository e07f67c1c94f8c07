"""Exception hierarchy shared by all dtlab modules."""


class DTLabError(Exception):
    """Base class for every error raised by the library."""


class DegenerateVertex(DTLabError):
    pass


class NonElliptic(DTLabError):
    pass


class IdentityIsometry(DTLabError):
    """Raised when a rotation angle is requested for (plus or minus) the identity."""


class AngleSumTooLarge(DTLabError):
    pass


class RegimeViolation(DTLabError):
    pass


class PolytopeViolation(DTLabError):
    pass


class MalformedChain(DTLabError):
    pass


class HolonomyMismatch(DTLabError):
    pass


class NotClosed(DTLabError):
    pass


class SingularFiber(DTLabError):
    pass


class SingularFiberEncountered(SingularFiber):
    pass


class BothDegenerate(DTLabError):
    pass


class RegularityLost(DTLabError):
    pass


class NumericallyUnstable(DTLabError):
    pass
