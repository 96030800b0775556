"""Exception hierarchy shared by all modules."""


class RosenspecError(Exception):
    """Base class for every error raised by the package."""


class NonCommutative(RosenspecError):
    pass


class NonAssociative(RosenspecError):
    pass


class BadModulus(RosenspecError):
    pass


class TooLarge(RosenspecError):
    """A configured enumeration cap was exceeded (never silently truncated)."""


class MixedRings(RosenspecError):
    pass


class NeedsBound(RosenspecError):
    pass


class NotPrime(RosenspecError):
    pass


class NotADomain(RosenspecError):
    pass


class NotPid(RosenspecError):
    pass


class ZeroModule(RosenspecError):
    pass


class IllDefined(RosenspecError):
    """A proposed homomorphism does not respect the source relations."""


class BadGluing(RosenspecError):
    pass


class MixedCharacteristic(RosenspecError):
    pass


class IncompatibleTransitions(RosenspecError):
    pass


class NotIntegral(RosenspecError):
    pass


class MixedSchemes(RosenspecError):
    pass


class NotInvertible(RosenspecError):
    pass


class MismatchBug(RosenspecError):
    """A reconstruction comparison failed, which indicates a bug rather than bad input."""


class ParseError(RosenspecError):
    pass


class UnknownSuite(RosenspecError):
    pass
