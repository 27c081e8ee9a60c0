"""Exception hierarchy shared by the package and mapped to CLI exit codes."""


class MDLVQError(Exception):
    exit_code = 1


class InputError(MDLVQError, ValueError):
    """Bad argument: wrong dimension, zero ring element, invalid weights, ..."""

    exit_code = 1


class ConstructionError(MDLVQError, RuntimeError):
    """An invariant failed while building a sublattice system or labeling."""

    exit_code = 2


class NotCleanError(ConstructionError):
    """A nearest-point tie was found where a clean sublattice is required."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class ResourceError(MDLVQError):
    exit_code = 2


class UnsupportedError(MDLVQError):
    exit_code = 1


class CorruptionError(MDLVQError):
    """A received index pair is not in the image of the labeling."""

    exit_code = 2


class VerificationError(MDLVQError):
    exit_code = 3
