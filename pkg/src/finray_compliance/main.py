"""
Main entry point for the finray toolkit.

Subcommands: design, characterize, fit-visco, simulate, sweep and schema.
Exit codes: 0 success, 1 usage or config error, 2 unknown entity,
3 numerical failure.
"""

import argparse
import asyncio
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from .cli.commands import (
    COMMANDS,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_USAGE,
    CommandOptions,
    CommandResult,
    exit_code_for,
)
from .cli.study_config import StudyConfig, load_study_config, study_schema
from .data.models import Axis
from .errors import ConfigError, FinrayError
from .services.gateway import StudyGateway
from .utils.config import get_config
from .utils.logging_config import setup_logging

logger = logging.getLogger(__name__)

console = Console(stderr=True)

# Commands that run without a study config file.
CONFIG_OPTIONAL = {"fit-visco", "schema"}


class UsageError(Exception):
    pass


class FinrayArgumentParser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with code 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Study config JSON (default: $FINRAY_CONFIG)")
    common.add_argument("--out", help="Output directory (default: config output_dir)")
    common.add_argument("--jobs", type=int, help="Worker processes for grid sweeps")
    common.add_argument("--step", type=float, help="Offset scan step in mm")
    common.add_argument("--verbose", action="store_true", help="Debug logging")

    parser = FinrayArgumentParser(
        prog="finray",
        description="Fin-ray finger design, compliance identification and insertion studies",
    )
    sub = parser.add_subparsers(dest="command", parser_class=FinrayArgumentParser)
    sub.required = True

    design = sub.add_parser("design", parents=[common], help="Frame SVG and STL of one design")
    design.add_argument("--id", dest="design_id", required=True, help="Design id")

    sub.add_parser("characterize", parents=[common], help="Stiffness report over the grid")

    visco = sub.add_parser("fit-visco", parents=[common], help="Spring-damper fit of ramp samples")
    visco.add_argument("--samples", type=Path, help="CSV with displacement, velocity, force")

    simulate = sub.add_parser("simulate", parents=[common], help="One insertion trace")
    simulate.add_argument("--scenario", dest="scenario_id", required=True)
    simulate.add_argument("--design", dest="design_id")
    simulate.add_argument("--offset", type=float, help="Misalignment along the scenario axis")
    simulate.add_argument("--axis", choices=[a.value for a in Axis])

    sweep = sub.add_parser("sweep", parents=[common], help="Tolerance windows over the grid")
    sweep.add_argument("--scenario", dest="scenario_id", required=True)
    sweep.add_argument("--axis", choices=[a.value for a in Axis])

    sub.add_parser("schema", parents=[common], help="Print the study config JSON schema")
    return parser


# ============ Output ============

def print_records(result: CommandResult, command: str):
    """Summary table of the command's records."""
    if command == "characterize" and result.records:
        table = Table(title="Stiffness report")
        for column in ("design_id", "kyy", "kzz", "kzy", "ratio", "rcc_angle_deg", "status"):
            table.add_column(column, style="cyan" if column == "design_id" else None)
        for r in result.records:
            table.add_row(
                r.design_id,
                *(_fmt(getattr(r, c)) for c in ("kyy", "kzz", "kzy", "ratio", "rcc_angle_deg")),
                r.status if r.status == "ok" else f"[red]{r.status} {r.error_code}[/red]",
        )
        console.print(table)
    elif command == "sweep" and result.records:
        table = Table(title=f"Tolerance windows ({result.summary.get('axis')} axis)")
        for column in ("design_id", "kyy", "min_offset", "max_offset", "window_mm", "limiting"):
            table.add_column(column, style="cyan" if column == "design_id" else None)
        for r in result.records:
            table.add_row(
                r.design_id,
                _fmt(r.kyy),
                _fmt(r.min_offset),
                _fmt(r.max_offset),
                _fmt(r.window_mm),
                r.limiting_outcome if r.status == "ok" else f"[red]{r.error_code}[/red]",
        )
        console.print(table)

    if result.summary:
        lines = [f"{key}: {_fmt(value)}" for key, value in result.summary.items()]
        console.print(Panel("\n".join(lines), title=command, border_style="green"))
    for path in result.files:
        console.print(f"[dim]wrote {path}[/dim]")


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)


# ============ Entry ============

async def run_command(args: argparse.Namespace) -> int:
    """Load the config, run one subcommand and report it; returns the exit code."""
    env = get_config()
    config_path = args.config or env.config_path

    if args.command == "schema":
        print(json.dumps(study_schema(), indent=2, sort_keys=True))
        return EXIT_OK

    if config_path is not None:
        config = load_study_config(config_path)
    elif args.command in CONFIG_OPTIONAL:
        config = StudyConfig()
    else:
        raise ConfigError(f"{args.command} needs --config or FINRAY_CONFIG")

    out_dir = Path(args.out or config.output_dir or env.output_dir)
    try:
        options = CommandOptions(
            out_dir=out_dir,
            step=args.step,
            axis=getattr(args, "axis", None),
            design_id=getattr(args, "design_id", None),
            scenario_id=getattr(args, "scenario_id", None),
            offset=getattr(args, "offset", None),
            samples=getattr(args, "samples", None),
        )
    except ValidationError as e:
        raise ConfigError(f"invalid options: {e}") from e
    gateway = StudyGateway(jobs=args.jobs or env.jobs)

    with console.status(f"[bold green]Running {args.command}...[/bold green]"):
        result = await COMMANDS[args.command](config, options, gateway)

    print_records(result, args.command)
    if result.exit_code == EXIT_NUMERICAL:
        console.print("[red]Every grid point failed[/red]")
    return result.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        console.print(f"[red]Error: {e}[/red]")
        return EXIT_USAGE

    env = get_config()
    setup_logging("DEBUG" if args.verbose else env.log_level)

    try:
        return asyncio.run(run_command(args))
    except FinrayError as e:
        code = exit_code_for(e)
        logger.debug(f"{args.command} failed with {e.error_code}", exc_info=True)
        console.print(f"[red]Error ({e.error_code}): {e}[/red]")
        return code


if __name__ == "__main__":
    sys.exit(main())
