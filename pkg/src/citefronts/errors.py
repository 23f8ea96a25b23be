"""Shared exception types, mapped to CLI exit codes."""


class CiteFrontsError(Exception):
    """Base class for all package errors."""


class ParseError(CiteFrontsError):
    """Malformed input file (bad record block, undecodable bytes, ...)."""


class DataError(CiteFrontsError):
    """Inputs violate an operation's preconditions or invariants."""


class StageError(CiteFrontsError):
    """A pipeline stage failed; carries the stage name."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
