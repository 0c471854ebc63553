"""
Exception hierarchy for the hyperhate toolkit.

Shape and argument errors subclass ValueError so callers that only know
about ValueError keep working. The CLI maps the families to exit codes.
"""


class HyperHateError(Exception):
    """Base class for all toolkit errors."""


# Tensor / autodiff errors

class DimensionError(HyperHateError, ValueError):
    """Operand shapes are incompatible."""


class UnsupportedKernelError(HyperHateError, ValueError):
    """Convolution kernel width cannot be used with the requested padding."""


class EmptyOutputError(HyperHateError, ValueError):
    """An operation would produce a tensor with a zero-length axis."""


class EmptySequenceError(HyperHateError, ValueError):
    """A recurrent operation received a sequence of length zero."""


class InvalidProbabilityError(HyperHateError, ValueError):
    """A probability argument is outside its allowed range."""


class RankError(HyperHateError, ValueError):
    """A scalar was required but a higher-rank tensor was given."""


class CorruptInputError(HyperHateError, ValueError):
    """An encoded index lies outside the embedding table."""


class NumericalError(HyperHateError, ArithmeticError):
    """Training produced non-finite values and was aborted."""


# Data errors

class DataError(HyperHateError):
    """Base class for dataset problems."""


class SchemaError(DataError):
    """A data file lacks a required column."""

    def __init__(self, message: str, path: str = None, line: int = None):
        location = ""
        if path is not None:
            location = f"{path}"
            if line is not None:
                location += f":{line}"
            location += ": "
        super().__init__(f"{location}{message}")
        self.path = path
        self.line = line


class RecordError(SchemaError):
    """A single record could not be parsed."""


class InvalidLabelError(DataError, ValueError):
    """A label is not one of {0, 1}."""


class DegenerateDataError(DataError):
    """A dataset lacks enough examples of one of the classes."""


class DegenerateSplitError(DegenerateDataError):
    """A stratified split cannot be formed."""


class ShortfallError(DataError):
    """An augmentation file holds fewer records than requested."""

    def __init__(self, message: str, available: dict = None):
        super().__init__(message)
        self.available = available or {}


class MetricsError(HyperHateError, ValueError):
    """Predictions and gold labels cannot be compared."""


class ExperimentError(HyperHateError):
    """An experiment grid cell failed or the experiment was misconfigured."""


class IncompatibleCheckpointError(HyperHateError):
    """A checkpoint or results file cannot be used by this library version."""


class UsageError(HyperHateError):
    """Command-line usage error."""
