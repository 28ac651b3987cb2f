"""Exception types raised by splitadmm."""


class SplitADMMError(Exception):
    """Base class for all package errors."""


class DimensionError(SplitADMMError, ValueError):
    """Operand shapes are not conformable."""


class NumericalError(SplitADMMError, ArithmeticError):
    """A non-finite value appeared in the data or in the iterates.

    ``iteration`` is the last iteration whose iterates were all finite
    (0 when the failure happened before the first update completed).
    """

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


class SingularityError(NumericalError):
    """A Hermitian positive-definite factorization broke down."""


class PartitionError(SplitADMMError, ValueError):
    """Requested block division is incompatible with the matrix size."""


class ParameterError(SplitADMMError, ValueError):
    """An argument is outside its admissible range."""


class FormatError(SplitADMMError, ValueError):
    """A CMAT file is malformed. ``offset`` is the byte position of the fault."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class MetricsError(SplitADMMError, ValueError):
    """Recovery metrics are undefined for the given inputs."""
