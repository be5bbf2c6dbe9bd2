"""Exception types raised across the simulator."""


class MrrSimError(Exception):
    """Base class for all simulator errors."""


class DomainError(MrrSimError, ValueError):
    """Argument outside the mathematical domain of a function."""


class RangeError(MrrSimError, ValueError):
    """Value outside a configured physical or numeric range."""


class CalibrationError(MrrSimError, ValueError):
    """Degenerate device calibration (e.g. zero transmission span)."""


class ShapeError(MrrSimError, ValueError):
    """Operand shapes or lengths do not agree."""


class ConfigError(MrrSimError, ValueError):
    """Invalid configuration or constraint set."""


class ValidationError(MrrSimError, ValueError):
    """A parsed document failed schema or invariant validation."""


class UnsupportedModeError(MrrSimError, ValueError):
    """Requested mapping mode is not supported by this operation."""
