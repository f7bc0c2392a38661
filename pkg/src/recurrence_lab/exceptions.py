"""Exception hierarchy for recurrence_lab."""


class RecurrenceLabError(Exception):
    """Base class for all errors raised by the package."""


class DomainError(RecurrenceLabError, ValueError):
    """A point lies outside the phase-space representation of a system."""


class ResourceLimitError(RecurrenceLabError):
    """A requested size exceeds a configured limit."""


class IncompatibleMeasureError(RecurrenceLabError, ValueError):
    """The measure kind cannot be used with the system kind."""


class BoundaryError(RecurrenceLabError):
    """An orbit point landed exactly on a partition boundary (strict coding)."""


class WindowExceededError(RecurrenceLabError, IndexError):
    """A symbolic point was read beyond its stored window."""


class InsufficientDataError(RecurrenceLabError):
    """Too few usable points for a fit."""


class AllCensoredError(InsufficientDataError):
    """Every observation needed by an estimator was censored."""


class MissingReportError(RecurrenceLabError, KeyError):
    """A verdict needs an estimate that the bundle does not contain."""


class ConfigError(RecurrenceLabError, ValueError):
    """Experiment configuration failed schema validation."""
