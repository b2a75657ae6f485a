class BoxAlgebraError(Exception):
    """Base class for all errors raised by boxalg."""


class ValidationError(BoxAlgebraError, ValueError):
    """Input data violate a structural requirement (unit, shapes, events)."""


class UnsupportedConstruction(BoxAlgebraError):
    """The requested algebra or operation is outside what the library builds."""


class FormalRealityError(BoxAlgebraError):
    """An element has non-real spectrum, so the algebra is not formally real."""


class UndefinedConditioning(BoxAlgebraError):
    """Conditioning on an event of (numerically) zero probability."""


class SamplingError(BoxAlgebraError):
    """Random sampling failed to produce a non-degenerate draw."""


class ConsistencyError(BoxAlgebraError):
    """An internal numerical consistency check failed."""
