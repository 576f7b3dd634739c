"""Exception types shared across the solver modules."""


class SectorEulerError(Exception):
    """Base class for all solver errors."""


class InvalidParameterError(SectorEulerError, ValueError):
    """A configuration or call parameter is out of its admissible range."""


class ResonanceError(SectorEulerError):
    """The angular elliptic problem is (near-)singular and cannot be solved."""


class StepRejectedError(SectorEulerError):
    """A time step violated the CFL condition.

    Carries the largest admissible step in ``admissible_dt``.
    """

    def __init__(self, message, admissible_dt):
        super().__init__(message)
        self.admissible_dt = admissible_dt


class NoBlowupDetectedError(SectorEulerError):
    """The diagnostic series does not support a finite-time blow-up fit."""


class CflExhaustedError(SectorEulerError):
    """Adaptive time stepping drove dt below the hard floor."""


class SingularityError(SectorEulerError, ValueError):
    """Green's function evaluated on its diagonal x = y."""


class DomainError(SectorEulerError, ValueError):
    """A point lies outside the closed sector."""


class TruncationError(SectorEulerError):
    """Source support touches the outer truncation region of the grid."""


class SupportEscapeError(SectorEulerError):
    """A backtraced characteristic left through the outer arc."""


class InsufficientResolutionError(SectorEulerError):
    """A fit window contains too few grid nodes to be meaningful."""


class SynchronizationError(SectorEulerError):
    """Two coupled runs disagree on the current time."""


class ConfigError(SectorEulerError, ValueError):
    """Run configuration is malformed, incomplete, or contains unknown keys."""
