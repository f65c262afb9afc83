"""
fieldcover - coverage path planning for agricultural fields with obstacles.

Field files: a versioned YAML description of a field and the machine that
covers it.

    schema_version: 1
    name: diamond
    boundary: [[0, 0], [10, 0], [10, 10], [0, 10]]
    obstacles:
      - [[5, 3], [7, 5], [5, 7], [3, 5]]
    driving_direction_deg: 90
    operating_width_m: 1.0
    r_min_m: 1.0
    reverse_capable: false
"""

import logging
import math
from pathlib import Path
from typing import List, Literal, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from fieldcover.core.decomposition import SweepFrame
from fieldcover.core.errors import FieldFileError, GeometryError, MachineSpecError, OutputError
from fieldcover.core.geometry import FreeSpace, Polygon
from fieldcover.core.tracks import MachineSpec

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

Ring = List[Tuple[float, float]]


class FieldFile(BaseModel):
    """Schema of a field file."""

    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    schema_version: Literal[1] = Field(SCHEMA_VERSION, description="Field file format version")
    name: str = Field("field", description="Field name used in reports")
    boundary: Ring = Field(..., min_length=3, description="Outer boundary vertices in meters")
    obstacles: List[Ring] = Field(default_factory=list, description="Obstacle rings in meters")
    driving_direction_deg: float = Field(
        0.0, description="Track direction in degrees counter-clockwise from +x"
    )
    operating_width_m: float = Field(..., gt=0, description="Implement operating width")
    r_min_m: float = Field(..., gt=0, description="Minimum turning radius")
    reverse_capable: bool = Field(False, description="Whether the machine can reverse")

    def to_domain(self) -> Tuple[FreeSpace, MachineSpec, SweepFrame]:
        """
        Build validated domain objects.

        Raises:
            FieldFileError: Naming the offending field when an invariant fails
        """
        try:
            boundary = _ring(self.boundary, "boundary")
            obstacles = tuple(
                _ring(ring, f"obstacles[{i}]") for i, ring in enumerate(self.obstacles)
            )
            free = FreeSpace(boundary, obstacles)
        except GeometryError as e:
            raise FieldFileError(e.message, location=e.field or "boundary") from e
        try:
            spec = MachineSpec(self.operating_width_m, self.r_min_m, self.reverse_capable)
        except MachineSpecError as e:
            raise FieldFileError(str(e), location="machine") from e
        return free, spec, SweepFrame.from_degrees(self.driving_direction_deg)

    @classmethod
    def from_domain(
        cls, free: FreeSpace, spec: MachineSpec, frame: SweepFrame, name: str = "field"
    ) -> "FieldFile":
        degrees = math.degrees(math.atan2(frame.direction[1], frame.direction[0]))
        return cls(
            name=name,
            boundary=free.boundary.coords,
            obstacles=[o.coords for o in free.obstacles],
            driving_direction_deg=degrees,
            operating_width_m=spec.operating_width,
            r_min_m=spec.r_min,
            reverse_capable=spec.reverse_capable,
        )


def _ring(coords: Ring, label: str) -> Polygon:
    try:
        return Polygon.from_coords(coords)
    except GeometryError as e:
        raise GeometryError(e.message, field=e.field or label) from e


def _location(loc: Tuple[Union[str, int], ...]) -> str:
    text = ""
    for part in loc:
        text += f"[{part}]" if isinstance(part, int) else (f".{part}" if text else str(part))
    return text or "field"


def load_field_file(path: Union[str, Path]) -> FieldFile:
    """
    Parse and validate a field file without building domain objects.

    Raises:
        FieldFileError: With ``line:column`` for syntax errors or the field
            path for schema errors
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise FieldFileError(f"cannot read field file: {e.strerror or e}", location=str(path))

    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        location = f"{mark.line + 1}:{mark.column + 1}" if mark is not None else str(path)
        problem = getattr(e, "problem", None) or "invalid YAML"
        raise FieldFileError(problem, location=location)

    if not isinstance(data, dict):
        raise FieldFileError("field file must be a mapping", location=str(path))
    try:
        field = FieldFile.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise FieldFileError(first["msg"], location=_location(first["loc"]))
    logger.debug("read field '%s' from %s", field.name, path)
    return field


def load_field(path: Union[str, Path]) -> Tuple[FreeSpace, MachineSpec, SweepFrame]:
    """
    Load a field file into free space, machine and sweep frame.

    Args:
        path: Path to a YAML field file

    Returns:
        Tuple of (FreeSpace, MachineSpec, SweepFrame)

    Raises:
        FieldFileError: On syntax, schema or geometry errors
    """
    return load_field_file(path).to_domain()


def save_field(field: FieldFile, path: Union[str, Path]) -> Path:
    """
    Write a field file.

    Raises:
        OutputError: If the file cannot be written
    """
    path = Path(path)
    try:
        path.write_text(
            yaml.safe_dump(field.model_dump(mode="json"), sort_keys=False, default_flow_style=None)
        )
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e.strerror or e}")
    return path
