"""Exception hierarchy shared across the wakeplan package."""


class WakeplanError(Exception):
    """Base class for all wakeplan domain errors."""


class ConfigurationError(WakeplanError):
    """Raised when a grid spec, scenario, or config value is invalid."""


class GeometryError(WakeplanError):
    """Raised when the hull does not fit inside the domain."""


class EmptyFieldError(WakeplanError):
    """Raised when an operation needs non-occupied nodes and none exist."""


class FieldIOError(WakeplanError):
    """Base class for field/checkpoint serialization failures."""


class FormatError(FieldIOError):
    """Magic bytes or version of a serialized file do not match."""


class TruncatedFileError(FieldIOError):
    """File ended before the declared payload was read."""


class ChecksumError(FieldIOError):
    """Payload checksum does not match the stored CRC32."""


class NoPathError(WakeplanError):
    """Raised when the goal is unreachable from the start.

    Carries the number of nodes expanded before the search exhausted
    the reachable component.
    """

    def __init__(self, message: str, expanded: int = 0):
        super().__init__(message)
        self.expanded = expanded


class BlockedEdgeError(WakeplanError):
    """Raised when an edge cost is requested into an occupied node."""


class ProvenanceError(WakeplanError):
    """Raised when stats or metrics are combined with the wrong field."""


class OverlongPathError(WakeplanError):
    """Raised when a path exceeds the fixed training length."""


class ComparabilityError(WakeplanError):
    """Raised when benchmark corpora were not generated on matching grids."""
