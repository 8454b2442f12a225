class SkbmlfxError(Exception):
    """Base class for every error raised by the library."""


class InvalidArgument(SkbmlfxError, ValueError):
    pass


# numkernel

class NonFinite(SkbmlfxError, ValueError):
    pass


class NotSymmetric(SkbmlfxError, ValueError):
    pass


class SingularPencil(SkbmlfxError, ArithmeticError):
    pass


class DimensionMismatch(SkbmlfxError, ValueError):
    pass


# extractor / skb

class EmptyAllowedSet(SkbmlfxError, ValueError):
    pass


class UnknownClass(SkbmlfxError, KeyError):
    def __str__(self):
        # KeyError quotes its argument; keep the plain message.
        return str(self.args[0]) if self.args else ''


class SizeExceedsPrototypes(SkbmlfxError, ValueError):
    pass


class DuplicateIds(SkbmlfxError, ValueError):
    pass


class EmptySkb(SkbmlfxError, ValueError):
    pass


# channel

class NonPositiveDistance(SkbmlfxError, ValueError):
    pass


class ZeroRate(SkbmlfxError, ValueError):
    pass


# planner

class Infeasible(SkbmlfxError):
    pass


class NonConvergence(SkbmlfxError):
    pass


class DegenerateDenominator(SkbmlfxError, ArithmeticError):
    pass


class TooLarge(SkbmlfxError, ValueError):
    pass


class MalformedAssignment(SkbmlfxError, ValueError):
    pass


# data / configuration

class ConfigInvalid(SkbmlfxError, ValueError):
    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = errors or {}


class RejectionExhausted(SkbmlfxError):
    pass


class MalformedHeader(SkbmlfxError, ValueError):
    pass


class IoFailure(SkbmlfxError):
    pass
