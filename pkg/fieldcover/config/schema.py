"""
fieldcover - coverage path planning for agricultural fields with obstacles.

Configuration schema using Pydantic.
"""

from typing import Dict, Literal, Optional

from pydantic import BaseModel, Field, field_validator

from fieldcover.core.turns import TeeFormula


class PlannerConfig(BaseModel):
    """Configuration for sequencing and plan assembly."""

    exact_threshold: int = Field(
        15, ge=1, le=18, description="Largest track count solved exactly; larger instances use 2-opt"
    )
    tee_formula: TeeFormula = Field(
        TeeFormula.PAPER, description="Reversing-turn length variant ('paper' or 'normalized')"
    )
    headland_margin: Optional[float] = Field(
        None, ge=0, description="Track shortening at each end in meters (default: 2 * r_min)"
    )
    per_cell_order: Literal["optimal", "zigzag"] = Field(
        "optimal", description="Track order inside a cell for the traditional plan"
    )
    start_cell: int = Field(0, ge=0, description="Cell where the traditional plan starts")
    heuristic_restarts: int = Field(
        4, ge=0, description="Seeded random restarts of the 2-opt heuristic"
    )
    seed: int = Field(0, description="Seed for the heuristic's random restarts")


class RenderConfig(BaseModel):
    """Configuration for SVG output."""

    width_in: float = Field(8.0, gt=0, description="Figure width in inches")
    show_cell_ids: bool = Field(True, description="Whether to label cells with their ids")
    turn_colors: Dict[str, str] = Field(
        default_factory=lambda: {
            "omega": "#d62728",
            "pi": "#2ca02c",
            "tee": "#9467bd",
            "transfer": "#7f7f7f",
        },
        description="Plan polyline color per turn kind",
    )
    track_color: str = Field("#1f77b4", description="Color of track centerlines")


class LoggingConfig(BaseModel):
    """Configuration for diagnostics."""

    level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(
        "WARNING", description="Log level for the fieldcover logger"
    )
    show_traceback: bool = Field(False, description="Whether to show full traceback for errors")

    @field_validator("level", mode="before")
    @classmethod
    def _upper_level(cls, value: object) -> object:
        return value.upper() if isinstance(value, str) else value


class FieldCoverConfig(BaseModel):
    """Main configuration for fieldcover."""

    planner: PlannerConfig = Field(
        default_factory=PlannerConfig,
        description="Planner configuration",
    )
    render: RenderConfig = Field(
        default_factory=RenderConfig,
        description="SVG rendering configuration",
    )
    logging: LoggingConfig = Field(
        default_factory=LoggingConfig,
        description="Logging configuration",
    )
