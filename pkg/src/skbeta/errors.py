"""Exception types shared across the package."""


class SkbetaError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(SkbetaError):
    """A required column is missing from an input file."""


class ParseError(SkbetaError):
    """A cell could not be parsed; the message carries the line number."""


class EmptyInputError(SkbetaError):
    """An input file or value sequence contained no usable data."""


class IntegrityError(SkbetaError):
    """A fixture failed a strict integrity check (e.g. row count)."""


class DegenerateSampleError(SkbetaError):
    """The sample is too small for the requested statistic."""


class ZeroVarianceError(SkbetaError):
    """All sample values are equal; centered moments of order >= 2 vanish."""


class UndefinedShapeError(ZeroVarianceError):
    """Skewness/kurtosis are undefined because the variance is zero."""


class EmptyResultError(SkbetaError):
    """Every group was filtered out; there is nothing to report."""


class SingularDesignError(SkbetaError):
    """The least-squares design matrix is rank deficient."""


class FitDomainError(SkbetaError):
    """Input data violates the fitted model's domain (e.g. S <= 0)."""


class UnsupportedVariantError(SkbetaError):
    """The operation only applies to a different rank-model variant."""


class NotBetaRepresentableError(SkbetaError):
    """The (S, K) pair lies outside the Beta family (help-variable pole)."""


class UndefinedHelpVariableError(SkbetaError):
    """The (p, q, S) form of the help variable has a zero denominator."""


class InfeasibleMomentPairError(SkbetaError):
    """No positive (a, b) reproduces the requested moment pair.

    Carries the intermediate quantities for diagnosis.
    """

    def __init__(self, message, *, rho=None, discriminant=None, ab=None):
        super().__init__(message)
        self.rho = rho
        self.discriminant = discriminant
        self.ab = ab


class NonNormalizableError(SkbetaError):
    """The limit pmf does not normalize (requires b > 1)."""


class UnsupportedDerivationError(SkbetaError):
    """The closed-form exponent prediction is only derived for k0 = 1."""


class InsufficientDataError(SkbetaError):
    """Not enough tail data to estimate a slope."""


class InternalCheckError(SkbetaError):
    """An internal cross-check failed; indicates a bug, not bad input."""
