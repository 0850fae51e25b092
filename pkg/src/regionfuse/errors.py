"""Exception hierarchy shared by every module."""


class RegionFuseError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(RegionFuseError):
    """Invalid configuration or missing input paths."""


class FormatError(RegionFuseError):
    """Malformed or unsupported array container."""


class ShapeError(RegionFuseError, ValueError):
    """Array dimensions disagree with each other or with the expected rank."""


class RangeError(RegionFuseError, ValueError):
    """A score lies outside its documented range."""


class ConsistencyError(RegionFuseError, ValueError):
    """Assignment indices inconsistent with the declared region count."""


class ValidationError(RegionFuseError, ValueError):
    """Proposal masks overlap."""


class ModeError(RegionFuseError, ValueError):
    """Operation requested on data of the wrong mode (e.g. multi-class where C == 1 is required)."""


class UndefinedMetricError(RegionFuseError, ValueError):
    """A metric is undefined for the given input (e.g. single-class labels)."""


class NumericError(RegionFuseError, ArithmeticError):
    """Non-finite value met during a numeric check."""


class SpecError(RegionFuseError, ValueError):
    """Invalid synthetic scene specification."""
