"""
Command handlers behind the ``finray`` subcommands.

Handlers are coroutines taking the study config, the parsed options and a
gateway; they write files and return a CommandResult. Console output is
left to ``main``.
"""

import logging
from pathlib import Path
from typing import Any, Awaitable, Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from ..characterize.stiffness import apply_calibration
from ..characterize.viscoelastic import viscoelastic_samples
from ..data.models import Axis, FingerDesign, SearchTrace, StrategyParams
from ..data.reference import MEASURED_VISCOELASTIC
from ..errors import ConfigError, FinrayError, UnknownEntityError, UnknownMaterialError
from ..geometry.export import export_trajectory_svg
from ..insertion.simulate import viscous_force_estimate
from ..services.base import ServiceResult
from ..services.characterization_service import CharacterizationJob, failed_record
from ..services.gateway import StudyGateway
from ..services.insertion_service import WindowJob, failed_window
from .reports import (
    read_samples,
    write_json,
    write_samples,
    write_stiffness_report,
    write_trace,
    write_window_report,
)
from .study_config import StudyConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNKNOWN_ENTITY = 2
EXIT_NUMERICAL = 3

_EXIT_BY_CODE = {
    ConfigError.error_code: EXIT_USAGE,
    UnknownEntityError.error_code: EXIT_UNKNOWN_ENTITY,
    UnknownMaterialError.error_code: EXIT_UNKNOWN_ENTITY,
}


class CommandFailure(FinrayError):
    """A service call that failed, carrying the service's error code."""

    def __init__(self, message: str, error_code: Optional[str]):
        self.error_code = error_code or FinrayError.error_code
        super().__init__(message)


def exit_code_for(error: Exception) -> int:
    """Exit code of a toolkit error: 1 config, 2 unknown entity, 3 numerical."""
    return _EXIT_BY_CODE.get(getattr(error, "error_code", ""), EXIT_NUMERICAL)


def _unwrap(result: ServiceResult) -> Any:
    if not result.success:
        raise CommandFailure(result.error or "service call failed", result.error_code)
    return result.data


class CommandOptions(BaseModel):
    """Options shared by the subcommands; each handler reads what it needs."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    out_dir: Path
    step: Optional[float] = Field(None, gt=0)
    axis: Optional[Axis] = None
    design_id: Optional[str] = None
    scenario_id: Optional[str] = None
    offset: Optional[float] = None
    samples: Optional[Path] = None


class CommandResult(BaseModel):
    exit_code: int = EXIT_OK
    files: List[str] = Field(default_factory=list)
    records: List[Any] = Field(default_factory=list)
    summary: Dict[str, Any] = Field(default_factory=dict)


# ============ Calibration ============

async def calibrated_designs(
    config: StudyConfig,
    gateway: StudyGateway,
    designs: Sequence[Tuple[str, FingerDesign]],
) -> List[Tuple[str, FingerDesign]]:
    """
    Designs with the modulus scale of their material applied.

    Materials without an anchor are used as configured.

    Raises:
        CommandFailure: if a calibration run fails
    """
    anchors = config.anchors()
    if not anchors:
        return list(designs)
    results = await gateway.calibrate_materials(anchors, [d for _, d in designs], config.solver)
    scales = {name: _unwrap(result) for name, result in results.items()}
    out = []
    for design_id, design in designs:
        scale = scales.get(design.material.name)
        if scale is not None:
            design = design.model_copy(
                update={"material": apply_calibration(design.material, scale)}
            )
        out.append((design_id, design))
    return out


# ============ Commands ============

async def cmd_design(
    config: StudyConfig, options: CommandOptions, gateway: StudyGateway
) -> CommandResult:
    """Write the frame SVG and the STL of one named design."""
    if not options.design_id:
        raise ConfigError("design needs --id")
    design = config.design(options.design_id)
    files = _unwrap(gateway.design.export(options.design_id, design, options.out_dir, config.solver))
    return CommandResult(files=[files["svg"], files["stl"]], summary={"design": design.label})


async def cmd_characterize(
    config: StudyConfig, options: CommandOptions, gateway: StudyGateway
) -> CommandResult:
    """Stiffness, RCC and strength of every grid point into stiffness_report.csv."""
    designs = await calibrated_designs(config, gateway, config.grid_designs())
    jobs = [
        CharacterizationJob(
            design_id=design_id,
            design=design,
            settings=config.solver,
            kxx_lumped=config.kxx_lumped,
        )
        for design_id, design in designs
    ]
    results = await gateway.characterize_grid(jobs)
    records = [
        result.data if result.success else failed_record(job, result)
        for job, result in zip(jobs, results)
    ]
    path = write_stiffness_report(options.out_dir, records)
    failed = sum(1 for r in records if r.status != "ok")
    exit_code = EXIT_NUMERICAL if records and failed == len(records) else EXIT_OK
    return CommandResult(
        exit_code=exit_code,
        files=[str(path)],
        records=sorted(records, key=lambda r: r.sort_key),
        summary={"points": len(records), "failed": failed},
    )


async def cmd_fit_visco(
    config: StudyConfig, options: CommandOptions, gateway: StudyGateway
) -> CommandResult:
    """
    Spring-damper fit of ramp samples into visco_fit.json.

    Without ``--samples`` the fit runs on noise-free ramps of the bench values.
    """
    files = []
    if options.samples is not None:
        samples = read_samples(options.samples)
    else:
        samples = viscoelastic_samples(MEASURED_VISCOELASTIC["k"], MEASURED_VISCOELASTIC["b"])
        files.append(str(write_samples(options.out_dir / "visco_samples.csv", samples)))
    fit = _unwrap(gateway.characterization.fit_viscoelastic(samples))
    files.append(str(write_json(options.out_dir / "visco_fit.json", fit)))
    speed = StrategyParams().speed
    return CommandResult(
        files=files,
        records=[fit],
        summary={
            "samples": len(samples),
            "speed": speed,
            "viscous_force": viscous_force_estimate(fit, speed),
        },
    )


async def cmd_simulate(
    config: StudyConfig, options: CommandOptions, gateway: StudyGateway
) -> CommandResult:
    """One insertion of a scenario into trace_<id>.csv and trace_<id>.svg."""
    if not options.scenario_id:
        raise ConfigError("simulate needs --scenario")
    spec = config.scenario(options.scenario_id)
    axis = options.axis or spec.axis
    design_id = options.design_id or spec.design

    compliance = None
    if design_id is not None:
        [(_, design)] = await calibrated_designs(
            config, gateway, [(design_id, config.design(design_id))]
        )
        compliance = _unwrap(gateway.insertion.compliance(design, config.solver, config.kxx_lumped))
    scenario = spec.build(compliance)
    if options.offset is not None:
        scenario = scenario.with_offset(axis, options.offset)

    trace: SearchTrace = _unwrap(gateway.insertion.simulate(scenario, spec.strategy, axis))
    stem = f"trace_{options.scenario_id}"
    csv_path = write_trace(options.out_dir / f"{stem}.csv", trace)
    svg_path = options.out_dir / f"{stem}.svg"
    svg_path.write_text(export_trajectory_svg(trace), encoding="utf-8")
    return CommandResult(
        files=[str(csv_path), str(svg_path)],
        records=[trace],
        summary={
            "outcome": trace.outcome.value,
            "reason": trace.reason,
            "insert_depth": trace.insert_depth,
            "max_contact_force": trace.max_contact_force,
            "viscous_force": trace.viscous_force,
            "viscous_overforce": trace.viscous_overforce,
        },
    )


async def cmd_sweep(
    config: StudyConfig, options: CommandOptions, gateway: StudyGateway
) -> CommandResult:
    """Tolerance window of every grid design into window_report.csv plus trajectory SVGs."""
    if not options.scenario_id:
        raise ConfigError("sweep needs --scenario")
    spec = config.scenario(options.scenario_id)
    axis = options.axis or spec.axis
    step = options.step or spec.step

    designs = config.grid_designs()
    if not designs and spec.design is not None:
        designs = [(spec.design, config.design(spec.design))]
    if not designs:
        raise ConfigError("sweep needs a non-empty grid or a scenario design")
    designs = await calibrated_designs(config, gateway, designs)

    jobs = [
        WindowJob(
            design_id=design_id,
            design=design,
            scenario=spec.scenario_fields(),
            strategy=spec.strategy,
            axis=axis,
            step=step,
            settings=config.solver,
            kxx_lumped=config.kxx_lumped,
        )
        for design_id, design in designs
    ]
    results = await gateway.sweep_windows(jobs)

    records, files = [], []
    options.out_dir.mkdir(parents=True, exist_ok=True)
    for job, result in zip(jobs, results):
        if not result.success:
            records.append(failed_window(job, result))
            continue
        records.append(result.data.record)
        if result.data.trace is not None:
            svg_path = options.out_dir / f"{job.design_id}_{axis.value}_trajectory.svg"
            svg_path.write_text(export_trajectory_svg(result.data.trace), encoding="utf-8")
            files.append(str(svg_path))
    path = write_window_report(options.out_dir, records)
    failed = sum(1 for r in records if r.status != "ok")
    exit_code = EXIT_NUMERICAL if failed == len(records) else EXIT_OK
    return CommandResult(
        exit_code=exit_code,
        files=[str(path)] + files,
        records=sorted(records, key=lambda r: r.sort_key),
        summary={"designs": len(records), "failed": failed, "axis": axis.value, "step": step},
    )


Handler = Callable[[StudyConfig, CommandOptions, StudyGateway], Awaitable[CommandResult]]

COMMANDS: Dict[str, Handler] = {
    "design": cmd_design,
    "characterize": cmd_characterize,
    "fit-visco": cmd_fit_visco,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
}
