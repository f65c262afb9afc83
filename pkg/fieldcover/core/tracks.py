"""
fieldcover - coverage path planning for agricultural fields with obstacles.

Parallel coverage tracks inside the cells of a decomposition.
"""

import logging
import math
from dataclasses import dataclass
from typing import List

from fieldcover.core.decomposition import Cell, CellDecomposition, Side, SweepFrame
from fieldcover.core.errors import DecompositionError, MachineSpecError
from fieldcover.core.geometry import EPS, Point, Segment, clip_line

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MachineSpec:
    """Implement width and turning ability of the vehicle, in meters."""

    operating_width: float
    r_min: float
    reverse_capable: bool = False

    def __post_init__(self) -> None:
        if not (self.operating_width > 0 and math.isfinite(self.operating_width)):
            raise MachineSpecError(f"operating width must be positive, got {self.operating_width}")
        if not (self.r_min > 0 and math.isfinite(self.r_min)):
            raise MachineSpecError(f"minimum turning radius must be positive, got {self.r_min}")


@dataclass(frozen=True)
class Track:
    """
    A full-length chord of a cell at a fixed sweep offset.

    ``lower_end`` has the smaller along-track coordinate.
    """

    id: int
    cell_id: int
    centerline: Segment
    lower_end: Point
    upper_end: Point
    offset: float

    @property
    def length(self) -> float:
        return self.centerline.length

    def end(self, side: Side) -> Point:
        return self.lower_end if Side(side) is Side.LOWER else self.upper_end


def track_offsets(sweep_min: float, sweep_max: float, width: float) -> List[float]:
    """
    Offsets of the track centerlines across a sweep interval.

    Tracks are spaced by ``width`` starting half a width in; the last one is
    clamped so its swath ends at the far side. An interval narrower than the
    width gets one track on its midline.
    """
    extent = sweep_max - sweep_min
    if extent < width:
        return [(sweep_min + sweep_max) / 2.0]
    count = max(1, math.ceil(extent / width - EPS))
    offsets = [sweep_min + width / 2.0 + k * width for k in range(count)]
    offsets[-1] = min(offsets[-1], sweep_max - width / 2.0)
    return offsets


def generate_tracks(
    cell: Cell, spec: MachineSpec, frame: SweepFrame, first_id: int = 0
) -> List[Track]:
    """
    Tracks covering one cell, ordered by increasing offset.

    Args:
        cell: Cell to cover
        spec: Machine parameters (only the operating width is used)
        frame: Sweep frame of the decomposition the cell belongs to
        first_id: Id given to the first track

    Returns:
        Tracks with consecutive ids starting at ``first_id``

    Raises:
        DecompositionError: If an offset misses the cell
    """
    tracks = []
    for offset in track_offsets(*cell.sweep_interval, spec.operating_width):
        chords = clip_line(cell.local, Point(offset, 0.0), (0.0, 1.0))
        if not chords:
            raise DecompositionError(f"track at offset {offset:.6g} misses cell {cell.id}")
        lower = frame.to_world(offset, chords[0].start.y)
        upper = frame.to_world(offset, chords[-1].end.y)
        tracks.append(
            Track(
                id=first_id + len(tracks),
                cell_id=cell.id,
                centerline=Segment(lower, upper),
                lower_end=lower,
                upper_end=upper,
                offset=offset,
            )
        )
    return tracks


def generate_all_tracks(decomposition: CellDecomposition, spec: MachineSpec) -> List[Track]:
    """Tracks of every cell, numbered globally in cell order then offset order."""
    tracks: List[Track] = []
    for cell in decomposition.cells:
        tracks.extend(generate_tracks(cell, spec, decomposition.frame, first_id=len(tracks)))
    logger.info("generated %d tracks over %d cells", len(tracks), len(decomposition.cells))
    return tracks


def track_distance(a: Track, b: Track) -> float:
    """Distance between track centerlines along the sweep axis."""
    return abs(a.offset - b.offset)
