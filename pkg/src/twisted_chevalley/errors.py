"""Exception hierarchy shared by every module."""


class TwistedChevalleyError(Exception):
    pass


class NoHalf(TwistedChevalleyError):
    """2 is not invertible in the ring."""


class NoThird(TwistedChevalleyError):
    """3 is not invertible in the ring."""


class NoAntifixedUnit(TwistedChevalleyError):
    """The ring has no invertible a with theta(a) = -a."""


class NotInvertible(TwistedChevalleyError, ZeroDivisionError):
    pass


class RingMismatch(TwistedChevalleyError, TypeError):
    pass


class UnsupportedKind(TwistedChevalleyError, ValueError):
    pass


class SignFixFailed(TwistedChevalleyError):
    pass


class ParamConstraintViolated(TwistedChevalleyError, ValueError):
    pass


class NotBasedAtIdentity(TwistedChevalleyError, ValueError):
    pass


class SingularBasis(TwistedChevalleyError):
    pass


class DescriptorError(TwistedChevalleyError, ValueError):
    pass
