"""Exception hierarchy shared by all arwflow modules."""


class ArwFlowError(Exception):
    """Base class for all errors raised by this package."""


class InvalidField(ArwFlowError):
    """A field contains NaN/Inf or has the wrong shape for its grid."""


class DegenerateMetric(ArwFlowError):
    """A metric tensor is not positive definite where it must be."""


class OutOfRange(ArwFlowError):
    """A background evaluation was requested outside a < tau < 0."""


class NotSpacelike(ArwFlowError):
    """The graph violates the spacelike condition sigma^{ij} u_i u_j < 1."""


class FlowDegenerate(ArwFlowError):
    """The curvature speed F dropped to or below its positive floor."""


class OutsideCone(ArwFlowError):
    """Principal curvatures left the admissibility cone of the functional."""


class InvalidInitialData(ArwFlowError):
    """Initial height fails the preconditions of the flow."""


class StepFailure(ArwFlowError):
    """Time step could not be completed after repeated halving."""


class PinchingViolation(StepFailure):
    """Rescaled height left its admissible band during the run."""


class NotReady(ArwFlowError):
    """Not enough recorded history for a time-differenced diagnostic."""


class FitUndefined(ArwFlowError):
    """Log-linear rate fit requested on nonpositive data."""


class ConfigError(ArwFlowError):
    """Run configuration file is malformed or violates a precondition."""
