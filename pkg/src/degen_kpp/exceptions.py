"""Exception hierarchy shared by all modules."""


class DegenKPPError(Exception):
    """Base class for every error raised by this package."""


class DomainError(DegenKPPError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class IntegrationError(DegenKPPError, RuntimeError):
    """The ODE integrator or a quadrature failed.

    Parameters
    ----------
    message : str
    state : tuple, optional
        Last valid ``(x, y)`` pair of the failed integration, in chart
        coordinates.
    """

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class ConvergenceError(DegenKPPError, RuntimeError):
    """An iterative construction did not converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class SearchError(DegenKPPError, RuntimeError):
    """A bisection bracket did not contain a sign change."""


class EstimationError(DegenKPPError, RuntimeError):
    """A fit or rate estimate could not be produced reliably."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class ResolutionError(EstimationError):
    """Samples are too coarse for the requested finite differences."""


class ConsistencyError(DegenKPPError, RuntimeError):
    """Computed objects contradict each other (e.g. class tag vs shape)."""


class CertificateError(DegenKPPError, AssertionError):
    """A sub- or supersolution inequality failed at a witness point."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate
