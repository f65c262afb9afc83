"""
fieldcover - coverage path planning for agricultural fields with obstacles.

SVG rendering of decompositions and plans.
"""

import logging
from pathlib import Path
from typing import Iterable, Optional, Union

from matplotlib import rc_context
from matplotlib.figure import Figure
from matplotlib.patches import Polygon as PolygonPatch

from fieldcover.config.schema import RenderConfig
from fieldcover.core.decomposition import CellDecomposition
from fieldcover.core.errors import OutputError
from fieldcover.core.planner import CoveragePlan, LegKind
from fieldcover.core.tracks import Track

logger = logging.getLogger(__name__)

_RC = {"svg.hashsalt": "fieldcover", "svg.fonttype": "none"}
_FREE_COLOR = "#e8f3dc"
_OBSTACLE_COLOR = "#9e9e9e"
_CELL_EDGE = "#555555"


def render_svg(
    d: CellDecomposition,
    plan: Optional[CoveragePlan],
    path: Union[str, Path],
    tracks: Iterable[Track] = (),
    config: Optional[RenderConfig] = None,
) -> Path:
    """
    Draw free space, obstacles, cells, tracks and an optional plan to SVG.

    Elements carry ids (``cell-3``, ``track-7``, ``leg-0004-track-2``,
    ``leg-0005-pi``) so the output can be inspected or styled. Identical
    inputs produce identical bytes.

    Args:
        d: Decomposition to draw
        plan: Plan to overlay, or None
        path: Output file
        tracks: Track centerlines to draw
        config: Colors and sizing

    Returns:
        The written path

    Raises:
        OutputError: If the file cannot be written
    """
    config = config or RenderConfig()
    path = Path(path)

    with rc_context(_RC):
        fig = Figure()
        ax = fig.add_subplot()
        ax.set_aspect("equal")
        ax.set_axis_off()

        if d.free is not None:
            boundary = PolygonPatch(
                d.free.boundary.coords, closed=True, facecolor=_FREE_COLOR, edgecolor="black"
            )
            boundary.set_gid("boundary")
            ax.add_patch(boundary)
            for index, obstacle in enumerate(d.free.obstacles):
                patch = PolygonPatch(
                    obstacle.coords, closed=True, facecolor=_OBSTACLE_COLOR, edgecolor="black"
                )
                patch.set_gid(f"obstacle-{index}")
                ax.add_patch(patch)

        for cell in d.cells:
            patch = PolygonPatch(
                cell.polygon.coords,
                closed=True,
                fill=False,
                edgecolor=_CELL_EDGE,
                linestyle="--",
                linewidth=0.8,
            )
            patch.set_gid(f"cell-{cell.id}")
            ax.add_patch(patch)
            if config.show_cell_ids:
                anchor = cell.polygon.shape.representative_point()
                ax.text(anchor.x, anchor.y, str(cell.id), ha="center", va="center", fontsize=9)

        for track in tracks:
            (line,) = ax.plot(
                [track.lower_end.x, track.upper_end.x],
                [track.lower_end.y, track.upper_end.y],
                color=config.track_color,
                linewidth=0.6,
                alpha=0.5,
            )
            line.set_gid(f"track-{track.id}")

        if plan is not None:
            for index, leg in enumerate(plan.legs):
                xs = [p.x for p in leg.points]
                ys = [p.y for p in leg.points]
                if leg.kind is LegKind.TRACK:
                    (line,) = ax.plot(xs, ys, color="black", linewidth=1.6)
                    line.set_gid(f"leg-{index:04d}-track-{leg.track_id}")
                else:
                    color = config.turn_colors.get(leg.label, "#7f7f7f")
                    (line,) = ax.plot(xs, ys, color=color, linewidth=1.2)
                    line.set_gid(f"leg-{index:04d}-{leg.label}")

        ax.autoscale_view()
        xmin, xmax = ax.get_xlim()
        ymin, ymax = ax.get_ylim()
        aspect = (ymax - ymin) / (xmax - xmin) if xmax > xmin else 1.0
        fig.set_size_inches(config.width_in, max(1.0, config.width_in * aspect))

        try:
            fig.savefig(path, format="svg", metadata={"Date": None})
        except OSError as e:
            raise OutputError(f"cannot write {path}: {e.strerror or e}")
    logger.debug("rendered %d cells to %s", len(d.cells), path)
    return path
