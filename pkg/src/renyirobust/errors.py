"""Exception hierarchy shared by the library and the CLI."""


class RenyiRobustError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(RenyiRobustError, ValueError):
    """A hyperparameter, order, weight or count violates its domain."""


class FamilyMismatchError(RenyiRobustError, TypeError):
    """Prior, contaminant, posterior or statistics belong to different families."""


class SupportError(RenyiRobustError, ValueError):
    """A parameter point lies on or outside the support boundary."""


class MomentDoesNotExistError(RenyiRobustError, ArithmeticError):
    """A closed-form moment requires a non-positive Beta/Gamma argument."""


class UndefinedOrderError(RenyiRobustError, ArithmeticError):
    """The Renyi order is too large for this pair: a blended parameter is non-positive."""


class DegenerateWeightsError(RenyiRobustError, ArithmeticError):
    """Every log importance weight is -inf."""


class QuadratureError(RenyiRobustError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class CalibrationSaturatedError(RenyiRobustError, ValueError):
    """``d0`` exceeds ``ln 2`` for an order ``a != 1``; the coin would need ``p > 1``."""

    p = 1.0


class InfiniteDivergenceError(RenyiRobustError, ValueError):
    """``p = 1`` at ``a = 1`` corresponds to an infinite divergence."""


class ConfigError(RenyiRobustError):
    """A run configuration is malformed or inconsistent."""


class IngestError(RenyiRobustError):
    """Base class for data-file ingestion failures."""

    def __init__(self, message, row=None):
        if row is not None:
            message = f"line {row}: {message}"
        super().__init__(message)
        self.row = row


class MissingColumnError(IngestError):
    pass


class UnmappedCategoryError(IngestError):
    pass


class NonNumericValueError(IngestError):
    pass
