"""
fieldcover - coverage path planning for agricultural fields with obstacles.

Exception hierarchy shared by all modules.
"""

from typing import Optional, Sequence, Tuple


class FieldCoverError(Exception):
    """Base class for every error raised by fieldcover."""


class GeometryError(FieldCoverError):
    """Invalid planar input (polygons, lines, points)."""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}" if field else message)


class DegenerateGeometryError(GeometryError):
    """Polygon or free space violating a construction invariant."""


class DecompositionError(FieldCoverError):
    """The sweep could not order its events unambiguously."""


class TurnDomainError(FieldCoverError, ValueError):
    """A turn formula was evaluated outside its domain."""


class SolverLimitError(FieldCoverError):
    """The instance is too large for the requested solver."""


class InfeasibleSequenceError(FieldCoverError):
    """No visiting order avoids the infinite-cost transitions."""

    def __init__(self, message: str, isolated: Sequence[str] = ()):
        self.isolated: Tuple[str, ...] = tuple(isolated)
        if self.isolated:
            message = f"{message}; isolated headland component(s): {', '.join(self.isolated)}"
        super().__init__(message)


class FieldFileError(FieldCoverError):
    """A field file could not be parsed or failed validation."""

    def __init__(self, message: str, location: Optional[str] = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class OutputError(FieldCoverError):
    """An output file could not be written."""


class MachineSpecError(FieldCoverError, ValueError):
    """Machine parameters outside their valid range."""
