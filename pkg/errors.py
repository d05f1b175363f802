"""
Errors - Named failures raised by the approximation library
The CLI maps every HoloschemeError to exit code 3 and prints its name
"""


class HoloschemeError(Exception):
    """Base class for every library failure."""

    @property
    def name(self) -> str:
        return type(self).__name__

    def __str__(self) -> str:
        message = super().__str__()
        return f"{self.name}: {message}" if message else self.name


# series_core
class NonFiniteValue(HoloschemeError):
    pass


# spaces
class DegreeExceedsHorizon(HoloschemeError):
    pass


class NotAHilbertSpace(HoloschemeError):
    pass


class NonpositiveWeight(HoloschemeError):
    pass


class InadmissibleWeights(HoloschemeError):
    pass


class NotHermitian(HoloschemeError):
    pass


class NotPositiveDefinite(HoloschemeError):
    pass


# hb
class NotContractive(HoloschemeError):
    pass


class DegenerateSymbol(HoloschemeError):
    pass


class IllConditionedMate(HoloschemeError):
    pass


# schemes
class MissingRow(HoloschemeError):
    pass


class SingularGram(HoloschemeError):
    """Gram block failed to solve; the factor was validated at construction."""


class HorizonExhausted(HoloschemeError):
    pass


# embedding
class TailNotControlled(HoloschemeError):
    pass


class DivergentEvidence(HoloschemeError):
    pass


# diagnostics
class InsufficientQuadrature(HoloschemeError):
    pass


class HorizonExceeded(HoloschemeError):
    pass
