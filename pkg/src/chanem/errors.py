"""Exception hierarchy.

The CLI maps these onto distinct exit codes: parse/format problems,
precondition violations, and end-of-scenario each get their own code.
"""


class ChanemError(Exception):
    """Base class for all package errors."""


class InvalidInputError(ChanemError, ValueError):
    """An argument or configuration value violates a precondition."""


class SceneGeometryError(ChanemError):
    """Degenerate propagation geometry (endpoint on a facet, bad facet)."""


class DelayRangeError(ChanemError):
    """A path delay exceeds the configured maximum delay spread."""

    def __init__(self, message, path_index=None, snapshot_index=None):
        super().__init__(message)
        self.path_index = path_index
        self.snapshot_index = snapshot_index


class SequencingError(ChanemError):
    """A slot arrived out of order."""


class EndOfScenario(ChanemError):
    """A slot index lies beyond the end of the CIR timeline."""


class NoReferenceError(ChanemError):
    """Gain calibration was asked for a timeline with no usable snapshot."""


class FormatError(ChanemError):
    """A binary file or stream frame is malformed."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class ScenarioParseError(ChanemError):
    """A scene / trace / profile text file failed to parse."""

    def __init__(self, message, path=None, line=None):
        ctx = ""
        if path is not None:
            ctx = f"{path}:" if line is None else f"{path}:{line}:"
        super().__init__(f"{ctx} {message}" if ctx else message)
        self.path = path
        self.line = line
