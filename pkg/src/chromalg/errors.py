"""Exception types shared across the package."""


class ChromalgError(Exception):
    """Base class for all library errors."""


class DivisionByZero(ChromalgError):
    pass


class NotPIntegral(ChromalgError):
    """A p-local rational with p in the denominator was reduced mod p."""


class UnsupportedExtension(ChromalgError):
    """A root adjunction outside the Kummer / additive shapes was requested."""


class PrecisionExhausted(ChromalgError):
    """The u-precision window is too small to separate the terms involved."""


class VarMismatch(ChromalgError):
    pass


class BaseMismatch(ChromalgError):
    pass


class NonzeroConstantTerm(ChromalgError):
    pass


class NonUnitLeadingCoefficient(ChromalgError):
    pass


class GradingMismatch(ChromalgError):
    pass


class HeightTooLow(ChromalgError):
    pass


class CoefficientNotInFpn(ChromalgError):
    pass


class IndexOutOfRange(ChromalgError):
    pass


class InvalidWitness(ChromalgError):
    pass


class CompatibilityFailure(ChromalgError):
    """A C- and Lambda-coaction pair fails the colinearity condition."""


class RelationNotPreserved(ChromalgError):
    pass


class ConfigError(ChromalgError):
    pass
