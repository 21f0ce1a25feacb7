"""Exception hierarchy shared by every module in the package."""


class SamplingError(Exception):
    """Base class for all errors raised by tvsampling."""


class InvalidArgumentError(SamplingError, ValueError):
    """An argument violates an operation's precondition."""


class DataError(SamplingError, ValueError):
    """Input data contains non-finite values or is otherwise unusable."""


class NumericError(SamplingError, ArithmeticError):
    """A numerical routine failed (non-convergence, rank deficiency)."""


class RankDeficientError(NumericError):
    """No invertible submatrix could be selected."""


class ConditioningError(NumericError):
    """A selected submatrix is invertible but too ill-conditioned to trust."""


class AliasingError(SamplingError):
    """A sample stream is too sparse for the requested bandwidth."""


class IncompleteSamplesError(SamplingError):
    """A stream required by the reconstruction is missing."""


class DegenerateStageError(NumericError):
    """A reconstruction stage has a vanishing E-vector entry."""

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage


class MetricError(SamplingError, ValueError):
    """A metric is undefined for the given inputs (e.g. zero reference)."""


class ParseError(SamplingError, ValueError):
    """A file does not match its documented schema."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class StageError(SamplingError):
    """A reconstruction stage failed; ``stage`` names it (0 is the base stage)."""

    def __init__(self, message, stage):
        super().__init__(f"stage {stage}: {message}")
        self.stage = stage
