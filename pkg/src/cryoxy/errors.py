"""Exception hierarchy.

Validation problems derive from ``ValueError`` so plain ``except ValueError``
keeps working for callers that do not care about the finer classes. The CLI
maps :class:`ValidationError` to exit code 1 and :class:`NumericalError` to 2.
"""


class ValidationError(ValueError):
    """An argument or configuration value is outside its allowed range."""


class CapacityError(ValidationError):
    """Slot index beyond the 16-entry waveform memory."""


class FormatError(ValidationError):
    """Malformed binary instruction record or memory image."""


class NotProgrammedError(LookupError):
    """A select line addressed an empty memory slot."""


class UndefinedBlochError(ValueError):
    """The state has no weight in the qubit subspace."""


class NumericalError(ArithmeticError):
    """Propagation lost unitarity beyond tolerance."""


class CalibrationRangeError(RuntimeError):
    """No point of the calibration scan reaches the requested rotation."""


class PreconditionError(RuntimeError):
    """An experiment was started without a calibration it depends on."""
