"""Exception hierarchy shared by every module.

Each class carries the exit code and category the CLI reports for it.
"""


class AblateError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 3
    category = "runtime"


class DataError(AblateError, ValueError):
    """Invalid input data, configuration or file contents."""

    exit_code = 2
    category = "data"


class ShapeError(DataError):
    """Tensor shapes do not compose or a value is not finite."""


class ManifestError(DataError):
    """A network manifest is malformed or its layers do not compose."""


class ContainerError(DataError):
    """A model container file is malformed, truncated or corrupted."""


class DatasetFormatError(DataError):
    """An IDX file or dataset specification is malformed."""


class UnknownLayerError(DataError):
    """A named layer does not exist or has no parameters."""


class PerturbationError(DataError):
    """A perturbation request is invalid for its target."""


class DegenerateInputError(DataError):
    """Statistics requested on inputs with no variance or too few values."""


class CellNotFoundError(DataError):
    """A sweep cell referenced by a comparison does not exist."""


class TrainingDivergedError(AblateError, ArithmeticError):
    """Training produced a non-finite loss."""


class SweepError(AblateError):
    """A sweep trial failed; the message names the failing cell."""


class UsageError(AblateError):
    """A command line is inconsistent (missing or conflicting flags)."""

    exit_code = 1
    category = "usage"
