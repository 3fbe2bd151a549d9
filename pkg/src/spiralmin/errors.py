"""Exception types raised across the package."""


class SpiralMinError(Exception):
    """Base class for every error raised by spiralmin."""


# geometry kernel
class StencilOutOfChart(SpiralMinError, ValueError):
    pass


class NonFiniteValue(SpiralMinError, ValueError):
    pass


class DegenerateMetric(SpiralMinError, ValueError):
    pass


# catalog
class NotRealValued(SpiralMinError, ValueError):
    pass


class EmptyInput(SpiralMinError, ValueError):
    pass


class ZeroDimensionalPart(SpiralMinError, ValueError):
    pass


# profile curve
class OutsideDomain(SpiralMinError, ValueError):
    pass


class EmptyDomain(SpiralMinError, ValueError):
    pass


class SingularDenominator(SpiralMinError, ZeroDivisionError):
    pass


class EventLocalizationFailure(SpiralMinError, RuntimeError):
    pass


class OutOfSpan(SpiralMinError, ValueError):
    pass


# spiral products
class DimensionMismatch(SpiralMinError, ValueError):
    pass


class InputNotValidated(SpiralMinError, ValueError):
    pass


class C1NotMinusOne(SpiralMinError, ValueError):
    pass


class IntermediateNotCTR(SpiralMinError, RuntimeError):
    pass


# verifier
class NoSteadyAngle(SpiralMinError, ValueError):
    pass
