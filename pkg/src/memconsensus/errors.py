"""Exception types. The CLI maps them to exit codes 2, 3 and 4."""


class ParameterError(ValueError):
    """Invalid or inconsistent input parameters."""


class PreconditionError(ValueError):
    """Inputs are well-formed but the operation is undefined for them
    (e.g. parameters outside the consensus region)."""


class NumericError(ArithmeticError):
    """A numerical routine failed (singular system, eigensolver failure)."""


class DegenerateModeError(ParameterError):
    """A mode with phi == 0 was passed to a routine that cannot handle it."""


class AccuracyWarning(UserWarning):
    """A truncated computation may not have reached its target accuracy."""
