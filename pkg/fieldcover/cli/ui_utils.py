"""
fieldcover - coverage path planning for agricultural fields with obstacles.

Rich tables and messages for the CLI.
"""

import logging
from typing import Dict, List, Optional

from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from fieldcover.core.decomposition import CellDecomposition
from fieldcover.core.planner import CoveragePlan, PlanComparison

console = Console()
error_console = Console(stderr=True)
_show_traceback = False

# Color theme
THEME: Dict[str, str] = {
    "primary": "cyan",
    "success": "green",
    "warning": "yellow",
    "error": "red",
    "highlight": "magenta",
}


def theme_color(color_name: str) -> str:
    return THEME.get(color_name, "white")


def setup_logging(
    level: str = "WARNING", verbose: bool = False, show_traceback: bool = False
) -> None:
    """
    Route the fieldcover logger to stderr through rich.

    Args:
        level: Log level name from the configuration
        verbose: Force DEBUG regardless of ``level``
        show_traceback: Print the traceback along with error messages
    """
    global _show_traceback
    _show_traceback = show_traceback
    logger = logging.getLogger("fieldcover")
    logger.handlers.clear()
    logger.addHandler(RichHandler(console=error_console, show_path=False))
    logger.setLevel(logging.DEBUG if verbose else level.upper())


def print_error(message: str) -> None:
    error_console.print(f"[{theme_color('error')}]Error:[/{theme_color('error')}] {message}")


def print_exception(error: Exception) -> None:
    """Report an error; call from inside the handling ``except`` block."""
    print_error(str(error))
    if _show_traceback:
        error_console.print_exception()


def print_saved(kind: str, path: object) -> None:
    console.print(f"[{theme_color('success')}]Wrote {kind}:[/{theme_color('success')}] {path}")


def display_decomposition(d: CellDecomposition, track_counts: Optional[Dict[int, int]] = None) -> None:
    """Show one row per cell with its sweep interval and neighbours."""
    table = Table(title=f"Cell decomposition ({len(d.cells)} cells, {len(d.critical)} critical points)")
    table.add_column("Cell", style=theme_color("primary"), justify="right")
    table.add_column("Sweep interval (m)")
    table.add_column("Area (m²)", justify="right")
    table.add_column("Neighbours", style=theme_color("highlight"))
    if track_counts is not None:
        table.add_column("Tracks", justify="right")

    for cell in d.cells:
        lo, hi = cell.sweep_interval
        row = [
            str(cell.id),
            f"{lo:.3f} .. {hi:.3f}",
            f"{cell.polygon.shape.area:.3f}",
            ", ".join(str(n) for n in sorted(d.adjacency.neighbors(cell.id))) or "-",
        ]
        if track_counts is not None:
            row.append(str(track_counts.get(cell.id, 0)))
        table.add_row(*row)
    console.print(table)


def _plan_rows(plan: CoveragePlan) -> List[str]:
    m = plan.metrics
    counts = m.turn_counts
    return [
        f"{m.productive_m:.3f}",
        f"{m.nonproductive_m:.3f}",
        " ".join(f"{kind}={counts[kind]}" for kind in sorted(counts) if counts[kind]) or "-",
        " ".join(str(c) for c in m.cells_visited),
        plan.solver,
    ]


def _plan_table(title: str) -> Table:
    table = Table(title=title)
    table.add_column("Plan", style=theme_color("primary"))
    table.add_column("Productive (m)", justify="right")
    table.add_column("Nonproductive (m)", justify="right", style=theme_color("warning"))
    table.add_column("Turns")
    table.add_column("Cells visited")
    table.add_column("Solver")
    return table


def display_plan(plan: CoveragePlan) -> None:
    table = _plan_table(f"{plan.mode.value.capitalize()} plan ({len(plan.order)} tracks)")
    table.add_row(plan.mode.value, *_plan_rows(plan))
    console.print(table)


def display_comparison(comparison: PlanComparison) -> None:
    """Both plans side by side with the savings ratio."""
    table = _plan_table("Traditional vs global")
    table.add_row("traditional", *_plan_rows(comparison.traditional))
    table.add_row("global", *_plan_rows(comparison.global_plan))
    console.print(table)
    color = theme_color("success") if comparison.savings_ratio >= 0 else theme_color("error")
    console.print(f"Savings ratio: [{color}]{comparison.savings_ratio:.2%}[/{color}]")
