"""
fieldcover - coverage path planning for agricultural fields with obstacles.

Plan files and comparison reports, written as JSON.
"""

import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from fieldcover.core.errors import FieldFileError, OutputError, TurnDomainError
from fieldcover.core.geometry import EPS, Point, polyline_length
from fieldcover.core.planner import (
    TRANSFER,
    CoveragePlan,
    CoveragePlanner,
    LegKind,
    PlanComparison,
)
from fieldcover.core.turns import TeeFormula, min_turn
from fieldcover.persistence.field_file import FieldFile

logger = logging.getLogger(__name__)


class LegRecord(BaseModel):
    kind: LegKind
    length_m: float
    points: List[Tuple[float, float]]
    track_id: Optional[int] = None
    entry_end: Optional[str] = None
    turn: Optional[str] = None


class MetricsRecord(BaseModel):
    productive_m: float
    nonproductive_m: float
    turn_counts: Dict[str, int]
    cells_visited: List[int]


class SolverRecord(BaseModel):
    """How a plan was produced."""

    mode: str = Field(..., description="'traditional' or 'global'")
    method: str = Field(..., description="Solver(s) used: exact, heuristic or zigzag")
    exact_threshold: int
    tee_formula: str
    headland_margin_m: float
    seed: int


class PlanRecord(BaseModel):
    order: List[int]
    legs: List[LegRecord]
    metrics: MetricsRecord
    solver: SolverRecord


class PlanFile(BaseModel):
    schema_version: int = 1
    source: FieldFile = Field(..., description="Echo of the planned field")
    plan: PlanRecord


class CompareReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = 1
    source: FieldFile
    traditional: PlanRecord
    global_plan: PlanRecord = Field(..., alias="global")
    savings_ratio: float


def plan_record(plan: CoveragePlan, planner: CoveragePlanner) -> PlanRecord:
    """Serializable form of a plan, with the solver settings that produced it."""
    config = planner.config
    return PlanRecord(
        order=list(plan.order),
        legs=[
            LegRecord(
                kind=leg.kind,
                length_m=leg.length,
                points=[p.xy for p in leg.points],
                track_id=leg.track_id,
                entry_end=leg.entry_end.value if leg.entry_end is not None else None,
                turn=leg.label if leg.kind is LegKind.TRANSIT else None,
            )
            for leg in plan.legs
        ],
        metrics=MetricsRecord(
            productive_m=plan.metrics.productive_m,
            nonproductive_m=plan.metrics.nonproductive_m,
            turn_counts=dict(plan.metrics.turn_counts),
            cells_visited=list(plan.metrics.cells_visited),
        ),
        solver=SolverRecord(
            mode=plan.mode.value,
            method=plan.solver,
            exact_threshold=config.exact_threshold,
            tee_formula=config.tee_formula.value,
            headland_margin_m=planner.margin,
            seed=config.seed,
        ),
    )


def _write(path: Union[str, Path], model: BaseModel) -> Path:
    path = Path(path)
    try:
        path.write_text(model.model_dump_json(indent=2, by_alias=True) + "\n")
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e.strerror or e}")
    logger.debug("wrote %s", path)
    return path


def write_plan_file(
    path: Union[str, Path], source: FieldFile, plan: CoveragePlan, planner: CoveragePlanner
) -> Path:
    """
    Write a plan file.

    Raises:
        OutputError: If the file cannot be written
    """
    return _write(path, PlanFile(source=source, plan=plan_record(plan, planner)))


def write_compare_report(
    path: Union[str, Path],
    source: FieldFile,
    comparison: PlanComparison,
    planner: CoveragePlanner,
) -> Path:
    """
    Write both plans and the savings ratio.

    Raises:
        OutputError: If the file cannot be written
    """
    report = CompareReport(
        source=source,
        traditional=plan_record(comparison.traditional, planner),
        global_plan=plan_record(comparison.global_plan, planner),
        savings_ratio=comparison.savings_ratio,
    )
    return _write(path, report)


def read_plan_file(path: Union[str, Path]) -> PlanFile:
    """
    Read a plan file.

    Raises:
        FieldFileError: If the file cannot be read or does not validate
    """
    path = Path(path)
    try:
        return PlanFile.model_validate_json(path.read_text())
    except OSError as e:
        raise FieldFileError(f"cannot read plan file: {e.strerror or e}", location=str(path))
    except ValidationError as e:
        raise FieldFileError(str(e.errors()[0]["msg"]), location=str(path))


def remeasure(plan: PlanRecord) -> Tuple[float, float]:
    """
    Productive and nonproductive distance recomputed from the legs.

    Track legs are measured from their coordinates; turn legs contribute
    their recorded maneuver length, since the curve itself is not stored.
    """
    productive = math.fsum(
        polyline_length([Point(*xy) for xy in leg.points])
        for leg in plan.legs
        if leg.kind is LegKind.TRACK
    )
    nonproductive = math.fsum(leg.length_m for leg in plan.legs if leg.kind is LegKind.TRANSIT)
    return productive, nonproductive


def turn_mismatches(plan_file: PlanFile, rel_tol: float = 1e-6) -> List[int]:
    """
    Indices of turn legs whose recorded kind or length differs from the
    turn model evaluated on the spacing of the tracks on either side.
    """
    _, spec, frame = plan_file.source.to_domain()
    formula = TeeFormula(plan_file.plan.solver.tee_formula)
    legs = plan_file.plan.legs
    mismatches = []
    for i, leg in enumerate(legs):
        if leg.kind is not LegKind.TRANSIT or leg.turn in (None, TRANSFER):
            continue
        if not 0 < i < len(legs) - 1:
            mismatches.append(i)
            continue
        before = frame.sweep_value(Point(*legs[i - 1].points[-1]))
        after = frame.sweep_value(Point(*legs[i + 1].points[0]))
        try:
            expected = min_turn(abs(after - before), spec, formula)
        except TurnDomainError:
            mismatches.append(i)
            continue
        if expected.kind.value != leg.turn or not math.isclose(
            expected.length, leg.length_m, rel_tol=rel_tol, abs_tol=EPS
        ):
            mismatches.append(i)
    return mismatches


def verify_plan_file(plan_file: PlanFile, rel_tol: float = 1e-6) -> bool:
    """
    Whether the metrics block agrees with the remeasured legs and every
    turn leg carries the length of its maneuver.
    """
    productive, nonproductive = remeasure(plan_file.plan)
    metrics = plan_file.plan.metrics
    consistent = math.isclose(
        productive, metrics.productive_m, rel_tol=rel_tol, abs_tol=EPS
    ) and math.isclose(nonproductive, metrics.nonproductive_m, rel_tol=rel_tol, abs_tol=EPS)
    if not consistent:
        logger.warning(
            "plan metrics disagree with legs: productive %.9g vs %.9g, nonproductive %.9g vs %.9g",
            productive,
            metrics.productive_m,
            nonproductive,
            metrics.nonproductive_m,
        )
    bad_turns = turn_mismatches(plan_file, rel_tol)
    if bad_turns:
        logger.warning("turn legs disagree with the turn model: %s", bad_turns)
    return consistent and not bad_turns
