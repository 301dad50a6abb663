"""Exception hierarchy shared across the package.

The CLI maps these onto distinct exit codes: configuration problems,
bad input data, and everything else.
"""


class SabergenError(Exception):
    """Base class for all package errors."""


class ConfigError(SabergenError):
    """Invalid configuration: bad hyperparameters, malformed config files,
    missing required inputs named on the command line."""


class DataError(SabergenError):
    """Input data violates a contract: bad CSV schema, malformed token
    stream, empty prediction dump."""


class SerializationError(DataError):
    """A game cannot be rendered into tokens (e.g. unknown enumeration
    value, identifier containing characters outside the token alphabet)."""


class TokenParseError(DataError):
    """A token sequence is structurally malformed. Carries the offset of
    the offending token."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (token offset {offset})")
        self.offset = offset


class CheckpointError(SabergenError):
    """Checkpoint file is corrupt or inconsistent with its config block."""


class TrainingError(SabergenError):
    """Training aborted (non-finite loss or gradient)."""


class EvaluationError(DataError):
    """Metrics were requested on a dump that cannot support them."""
