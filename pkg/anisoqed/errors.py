# --------------------------------------------------------------
# Copyright (c) 2024, anisoqed developers
# License: GPLv3 (see LICENSE)
# --------------------------------------------------------------
"""Exception hierarchy. Each family maps to a command-line exit code."""


class AnisoError(Exception):
    """Base class of all anisoqed errors."""

    exit_code = 1

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or {}


# configuration (exit 2)


class ConfigurationError(AnisoError, ValueError):
    exit_code = 2


class SchemaError(ConfigurationError):
    """A configuration file does not match its schema."""

    def __init__(self, message, path=None, details=None):
        super().__init__(message, details)
        self.path = path


class WindowError(ConfigurationError):
    pass


class InvalidInputError(ConfigurationError):
    pass


# numerical convergence (exit 3)


class ConvergenceError(AnisoError, RuntimeError):
    exit_code = 3


class PoleLocationError(ConvergenceError):
    pass


class IllConditionedError(ConvergenceError):
    pass


class StabilityError(ConvergenceError):
    pass


class UnderflowError(ConvergenceError):
    pass


# physics validation (exit 4)


class PhysicsValidationError(AnisoError, ValueError):
    exit_code = 4


class OnsagerError(PhysicsValidationError):
    """Material tensors violate the Onsager relations or positivity."""

    def __init__(self, message, report=None):
        super().__init__(message, details={"report": report})
        self.report = report


class SingularMetricError(PhysicsValidationError):
    pass


class FactorizationError(PhysicsValidationError):
    pass


class EigenproblemError(PhysicsValidationError):
    pass


class SingularGreenError(PhysicsValidationError):
    pass


class SingularProjectorError(SingularGreenError):
    """The longitudinal/transverse projectors are undefined (q = 0)."""


class DecompositionError(SingularProjectorError):
    pass


class SingularQError(PhysicsValidationError):
    pass


class UndefinedSpeedError(PhysicsValidationError):
    pass


def exit_code(exc):
    """Exit code associated with an exception (1 for foreign errors)."""
    if isinstance(exc, AnisoError):
        return exc.exit_code
    return 1
