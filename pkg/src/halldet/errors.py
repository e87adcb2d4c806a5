"""Exception hierarchy shared across the toolkit.

Two families matter operationally: ``DataError`` (malformed or unusable
input data) and ``BackendError`` (the generation backend failed). The CLI
maps them to distinct exit codes.
"""


class HalldetError(Exception):
    """Base class for all toolkit errors."""


class DataError(HalldetError, ValueError):
    """Input data is malformed, inconsistent, or unusable."""


class BackendError(HalldetError):
    """A model backend request could not be served."""


# --- data-side errors -------------------------------------------------------

class UnknownClassToken(DataError):
    """A decoded token does not match any configured class token."""


class UnparseableOutput(DataError):
    """A component output sequence could not be parsed into (label, explanation)."""


class UnsupportedLabel(DataError):
    """An ingested label has no mapping into the two-class space."""


class DegenerateData(DataError):
    """Training data lacks at least one example per class."""


class LengthMismatch(DataError):
    """Two aligned sequences have different lengths."""


class EmptyInput(DataError):
    """An operation requiring at least one element received none."""


class TooFewRuns(DataError):
    """A significance test needs at least two paired runs."""


class ParseError(DataError):
    """A corpus file is malformed; message carries path and line number."""


class UnknownFormat(DataError):
    """The requested dataset format is not recognized."""


# --- backend-side errors ----------------------------------------------------

class BackendUnavailable(BackendError):
    """Transport failure or the backend reported itself unavailable."""


class InputTooLong(BackendError):
    """The backend refused the input rather than truncating it."""


class MalformedResponse(BackendError):
    """The backend violated the wire protocol."""


class MissingClassLogprobs(BackendError):
    """A result lacks class log-probabilities where they are required."""
