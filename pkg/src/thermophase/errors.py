"""Exception hierarchy shared by the solver, the audit and the CLI."""


class ThermophaseError(Exception):
    """Base class for every error raised on purpose by this package."""


class GridMismatchError(ThermophaseError, ValueError):
    """A field does not have the shape of the grid it is used with."""


class DomainError(ThermophaseError, ValueError):
    """A constitutive law was evaluated outside its domain (e.g. theta <= 0)."""


class SolverError(ThermophaseError):
    """A time step could not be completed."""


class PositivityError(SolverError):
    """The temperature update produced a nonpositive value.

    Never clamped: the caller is expected to retry with a smaller step.
    """

    def __init__(self, message, theta_min=None, dt=None):
        super().__init__(message)
        self.theta_min = theta_min
        self.dt = dt


class ConvergenceError(SolverError):
    """The Picard iteration of the heat step hit its iteration cap."""

    def __init__(self, message, iterations=None, increment=None):
        super().__init__(message)
        self.iterations = iterations
        self.increment = increment


class CFLError(SolverError):
    """The requested step violates the advective CFL bound."""


class ConfigError(ThermophaseError, ValueError):
    """Invalid configuration text or values."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SnapshotError(ThermophaseError, IOError):
    """A snapshot file is corrupt, truncated or of the wrong kind."""
