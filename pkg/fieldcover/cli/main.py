#!/usr/bin/env python3
"""
fieldcover - coverage path planning for agricultural fields with obstacles.

Main CLI entry point using Click.

Exit codes: 0 success, 1 usage error, 2 input error, 3 infeasible plan.
"""

import logging
from collections import Counter
from typing import Callable, List, Optional

import click
import yaml
from pydantic import ValidationError

from fieldcover import __version__
from fieldcover.cli import ui_utils
from fieldcover.cli.ui_utils import console
from fieldcover.config import loader
from fieldcover.config.schema import FieldCoverConfig, PlannerConfig
from fieldcover.core.decomposition import decompose
from fieldcover.core.errors import FieldCoverError, InfeasibleSequenceError
from fieldcover.core.planner import CoveragePlanner
from fieldcover.core.tracks import generate_all_tracks
from fieldcover.core.turns import TeeFormula
from fieldcover.persistence.field_file import load_field_file
from fieldcover.persistence.plan_file import write_compare_report, write_plan_file
from fieldcover.render.svg import render_svg

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3

FIELD_ARGUMENT = click.argument("field", type=click.Path(exists=True, dir_okay=False))


def planner_options(command: Callable) -> Callable:
    """Options shared by the planning commands, overriding the configuration."""
    options = [
        click.option(
            "--exact-threshold",
            type=click.IntRange(1, 18),
            help="Largest track count solved exactly (default from config: 15)",
        ),
        click.option(
            "--tee-formula",
            type=click.Choice([f.value for f in TeeFormula]),
            help="Reversing-turn length variant",
        ),
        click.option(
            "--headland-margin",
            type=click.FloatRange(min=0),
            help="Track shortening at each end in meters (default: 2 * r_min)",
        ),
        click.option(
            "--per-cell-order",
            type=click.Choice(["optimal", "zigzag"]),
            help="Track order inside a cell for the traditional plan",
        ),
        click.option("--seed", type=int, help="Seed for the heuristic's random restarts"),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _planner_config(config: FieldCoverConfig, **overrides: Optional[object]) -> PlannerConfig:
    update = {key: value for key, value in overrides.items() if value is not None}
    return PlannerConfig.model_validate({**config.planner.model_dump(), **update})


@click.group()
@click.version_option(version=__version__)
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False),
    help="Configuration file (default: ./.fieldcover, ~/.fieldcover, bundled)",
)
@click.option("--verbose", is_flag=True, help="Log planning steps to stderr")
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[str], verbose: bool) -> None:
    """fieldcover: coverage path planning for fields with obstacles."""
    config = loader.load_config(config_path)
    ui_utils.setup_logging(config.logging.level, verbose, config.logging.show_traceback)
    ctx.obj = config


@cli.command("decompose")
@FIELD_ARGUMENT
@click.option("--svg", "svg_path", type=click.Path(dir_okay=False), help="Write an SVG drawing")
@click.pass_obj
def decompose_command(config: FieldCoverConfig, field: str, svg_path: Optional[str]) -> None:
    """Decompose FIELD into cells and show their adjacency."""
    source = load_field_file(field)
    free, spec, frame = source.to_domain()
    decomposition = decompose(free, frame)
    tracks = generate_all_tracks(decomposition, spec)
    ui_utils.display_decomposition(decomposition, dict(Counter(t.cell_id for t in tracks)))
    if svg_path:
        render_svg(decomposition, None, svg_path, tracks, config.render)
        ui_utils.print_saved("SVG", svg_path)


@cli.command("plan")
@FIELD_ARGUMENT
@click.option(
    "--mode",
    type=click.Choice(["traditional", "global"]),
    default="global",
    show_default=True,
    help="Cell-by-cell or whole-field sequencing",
)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="Write a plan file (JSON)")
@click.option("--svg", "svg_path", type=click.Path(dir_okay=False), help="Write an SVG drawing")
@planner_options
@click.pass_obj
def plan_command(
    config: FieldCoverConfig,
    field: str,
    mode: str,
    out_path: Optional[str],
    svg_path: Optional[str],
    **overrides: Optional[object],
) -> None:
    """Plan complete coverage of FIELD."""
    source = load_field_file(field)
    free, spec, frame = source.to_domain()
    planner = CoveragePlanner(free, spec, frame, _planner_config(config, **overrides))
    plan = planner.plan_global() if mode == "global" else planner.plan_traditional()
    ui_utils.display_plan(plan)
    if out_path:
        write_plan_file(out_path, source, plan, planner)
        ui_utils.print_saved("plan", out_path)
    if svg_path:
        render_svg(planner.decomposition, plan, svg_path, planner.tracks, config.render)
        ui_utils.print_saved("SVG", svg_path)


@cli.command("compare")
@FIELD_ARGUMENT
@click.option(
    "--out", "out_path", type=click.Path(dir_okay=False), help="Write a comparison report (JSON)"
)
@click.option(
    "--svg", "svg_path", type=click.Path(dir_okay=False), help="Write an SVG of the global plan"
)
@planner_options
@click.pass_obj
def compare_command(
    config: FieldCoverConfig,
    field: str,
    out_path: Optional[str],
    svg_path: Optional[str],
    **overrides: Optional[object],
) -> None:
    """Compare traditional and global plans for FIELD."""
    source = load_field_file(field)
    free, spec, frame = source.to_domain()
    planner = CoveragePlanner(free, spec, frame, _planner_config(config, **overrides))
    comparison = planner.compare()
    ui_utils.display_comparison(comparison)
    if out_path:
        write_compare_report(out_path, source, comparison, planner)
        ui_utils.print_saved("report", out_path)
    if svg_path:
        render_svg(
            planner.decomposition, comparison.global_plan, svg_path, planner.tracks, config.render
        )
        ui_utils.print_saved("SVG", svg_path)


@cli.command("config")
@click.option("--list", "-l", "list_all", is_flag=True, help="List all configuration settings")
@click.option("--get", "-g", help="Get a configuration value (dot notation, e.g., planner.seed)")
@click.option("--set", "-s", "set_key", help="Set a configuration key (dot notation)")
@click.option("--value", "-v", help="Value to set for the specified key")
@click.pass_obj
def config_command(
    config: FieldCoverConfig,
    list_all: bool,
    get: Optional[str],
    set_key: Optional[str],
    value: Optional[str],
) -> None:
    """View or modify configuration settings."""
    if list_all:
        console.print("[bold]fieldcover configuration:[/bold]")
        console.print(config.model_dump_json(indent=2))
    elif get:
        try:
            found, value_type = loader.get_config_value(config, get)
        except KeyError as e:
            raise click.UsageError(str(e.args[0]))
        console.print(f"[bold]Value for {get}:[/bold] [green]{found}[/green] (Type: {value_type})")
    elif set_key and value is not None:
        try:
            updated = loader.set_config_value(config.model_dump(mode="json"), set_key, value)
        except ValueError as e:
            raise click.UsageError(str(e))
        config_path = loader.save_config(updated)
        console.print(f"[green]Successfully set {set_key} to {value}[/green]")
        console.print(f"Configuration saved to: {config_path}")
    else:
        click.echo(click.get_current_context().get_help())


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run the CLI and translate errors into exit codes.

    Args:
        argv: Arguments without the program name (default: sys.argv[1:])

    Returns:
        Process exit code
    """
    try:
        result = cli.main(args=argv, prog_name="fieldcover", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except click.Abort:
        ui_utils.print_error("aborted")
        return EXIT_USAGE
    except InfeasibleSequenceError as e:
        ui_utils.print_exception(e)
        return EXIT_INFEASIBLE
    except (ValidationError, yaml.YAMLError):
        # already reported by the configuration loader
        return EXIT_INPUT
    except FieldCoverError as e:
        logger.debug("input error: %s", type(e).__name__)
        ui_utils.print_exception(e)
        return EXIT_INPUT
    return result if isinstance(result, int) else EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
