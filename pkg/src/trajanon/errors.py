"""Exception types shared across the toolkit."""


class TrajAnonError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(TrajAnonError, ValueError):
    """Invalid configuration value (degenerate range, bad height, ...)."""


class BoundsError(TrajAnonError, ValueError):
    """Coordinate outside the bounding box / tree range."""


class ParseError(TrajAnonError, ValueError):
    """Malformed input file; carries the 1-based offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EmptyTrajectoryError(ParseError):
    """Input file contains no data rows."""


class InfeasibleAnonymityError(TrajAnonError):
    """Fewer trajectories than the anonymity parameter k allows."""
