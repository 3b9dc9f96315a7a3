"""Exception hierarchy.

Three branches matter to callers: InvalidModelError (the input model or data
fails structural validation), NumericFailure (a computation could not be
certified), and NoCertifiedMethod (no bound construction applies). The CLI
maps these to exit codes 2, 3 and 4 respectively.
"""


class MarkovUqError(Exception):
    """Base class for all package errors."""


class InvalidModelError(MarkovUqError):
    """Model, measure or observable fails structural validation."""


class DimensionMismatchError(InvalidModelError):
    """Vector or matrix shapes disagree."""


class ReducibleError(InvalidModelError):
    """The chain is not irreducible; no unique stationary measure."""


class MeasureMismatchError(InvalidModelError):
    """A stationary measure is paired with a model it does not belong to."""


class SupportMismatchError(InvalidModelError):
    """Two kernels or rate vectors do not share the required support."""


class NotInvariantError(InvalidModelError):
    """A measure claimed stationary fails the stationarity residual check."""


class ConstantObservableError(InvalidModelError):
    """The observable is constant on the support; tilting is degenerate."""


class NotReversibleError(InvalidModelError):
    """The generator is not self-adjoint with respect to its stationary measure."""


class LiapunovViolatedError(InvalidModelError):
    """The supplied (U, phi, b) data fails -A[U]/U >= phi - b somewhere."""


class ConstraintViolatedError(InvalidModelError):
    """Parameter constraints of a contraction-rate construction fail."""


class DisconnectedError(InvalidModelError):
    """The underlying graph is not connected."""


class StateSpaceTooLargeError(InvalidModelError):
    """Requested enumeration exceeds the configured state-count cap."""


class DimensionTooLargeError(InvalidModelError):
    """Requested dimension exceeds the configured cap."""


class TruncationTooSmallError(InvalidModelError):
    """State-space truncation leaves more tail mass than allowed."""


class InsufficientSamplesError(InvalidModelError):
    """Too few data points for the requested fit."""


class DomainViolationError(InvalidModelError):
    """An argument lies outside the domain of the requested transform."""


class OutOfRangeError(InvalidModelError):
    """A scalar parameter lies outside its admissible interval."""


class NumericFailure(MarkovUqError):
    """A numeric computation failed or could not be certified."""


class NonPositiveError(NumericFailure):
    """Solved stationary weights cannot be certified strictly positive."""


class ZeroGapError(NumericFailure):
    """The symmetrized generator has no spectral gap."""


class EigenFailureError(NumericFailure):
    """The symmetric eigensolve did not converge."""


class SingularPoissonError(NumericFailure):
    """The Poisson-equation solve is singular."""


class EvaluationFailureError(NumericFailure):
    """A cumulant bound evaluator returned NaN."""


class EtaUnreachableError(NumericFailure):
    """No exponential tilt reaches the requested divergence level."""


class NonDecayingError(NumericFailure):
    """A decay-rate fit produced a non-positive rate."""


class SimulationBlowupError(NumericFailure):
    """A simulated path exceeded the configured norm cap."""


class NoCertifiedMethod(MarkovUqError):
    """No certified cumulant-bound construction applies to the request."""
