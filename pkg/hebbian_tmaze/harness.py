from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Sequence

from hebbian_tmaze.analytics import CorrelationReport, MetricSummary, correlation_report, summarize_metrics
from hebbian_tmaze.constants import SENSOR_CHANNELS
from hebbian_tmaze.models import (
    ControllerMode,
    ExperimentConfig,
    MazeSpec,
    PlasticityConfig,
    SimulationSettings,
    TrialMetrics,
    TrialSpec,
    TurnDirection,
)
from hebbian_tmaze.network import Genotype
from hebbian_tmaze.plasticity import WeightChangeEntry
from hebbian_tmaze.storage import (
    StorageError,
    content_hash,
    read_csv_floats,
    read_genome_file,
    read_world_file,
    write_csv,
    write_json,
)
from hebbian_tmaze.trial import TrialRun, run_trial
from hebbian_tmaze.world import build_t_maze, with_light, with_luminosity, with_obstacles

LOGGER = logging.getLogger(__name__)

METRICS_HEADER: tuple[str, ...] = (
    "trial",
    "direction",
    "luminosity",
    "obstacles",
    "seed",
    "mode",
    "success",
    "steps",
    "time_to_goal",
    "path_length",
    "average_speed",
    "final_position_error",
    "min_position_error",
    "collision_steps",
    "weight_change_cumulative",
    "weight_change_per_step",
)
TRAJECTORY_HEADER: tuple[str, ...] = ("step", "t", "x", "y", "heading", "success_flag")
FITNESS_HEADER: tuple[str, ...] = ("step", "forward", "avoid", "spinning", "junction", "combined", "reward", "final")
WEIGHTS_HEADER: tuple[str, ...] = ("step", "F", "N_e", "sum_abs_delta", "max_abs_weight")
SENSORS_HEADER: tuple[str, ...] = ("step", *SENSOR_CHANNELS)


@dataclass
class ExperimentRow:
    trial: TrialSpec
    seed: int
    metrics: TrialMetrics

    @property
    def trial_id(self) -> str:
        return f"{self.trial.name}_seed{self.seed}"


@dataclass
class ExperimentResult:
    mode: ControllerMode
    rows: list[ExperimentRow]
    output_dir: Path
    base_rate: Optional[float] = None

    @property
    def metrics_path(self) -> Path:
        return self.output_dir / "metrics.csv"

    def summaries(self) -> list[MetricSummary]:
        return summarize_metrics((row.trial.name, row.metrics) for row in self.rows)


def trials_for(*, luminosity: float = 1.0, obstacles: int = 0) -> list[TrialSpec]:
    """Left and right variants of one environment setting."""

    suffix = f"lum{luminosity:g}_obs{obstacles}"
    return [
        TrialSpec(name=f"{direction.value}_{suffix}", direction=direction, luminosity=luminosity, obstacles=obstacles)
        for direction in (TurnDirection.LEFT, TurnDirection.RIGHT)
    ]


def dimming_trials() -> list[TrialSpec]:
    """Training brightness and a tenfold dimmed scene, both turn directions."""

    return trials_for(luminosity=1.0) + trials_for(luminosity=0.1)


def obstacle_trials() -> list[TrialSpec]:
    """Base maze, two and four added obstacles, both turn directions."""

    return [spec for count in (0, 2, 4) for spec in trials_for(obstacles=count)]


def build_trial_maze(base: MazeSpec, spec: TrialSpec) -> MazeSpec:
    maze = with_light(base, spec.direction.light_present)
    maze = with_luminosity(maze, spec.luminosity)
    return with_obstacles(maze, spec.obstacles)


def group_trial_ids(
    trials: Sequence[TrialSpec], trial_ids: Sequence[str]
) -> list[tuple[Optional[TrialSpec], list[str]]]:
    """Group ``<name>_seed<k>`` ids by the trial configuration they ran in, first-seen order."""

    by_name = {spec.name: spec for spec in trials}
    groups: dict[str, tuple[Optional[TrialSpec], list[str]]] = {}
    for trial_id in trial_ids:
        name = trial_id.rsplit("_seed", 1)[0]
        groups.setdefault(name, (by_name.get(name), []))[1].append(trial_id)
    return list(groups.values())


def load_inputs(config: ExperimentConfig) -> tuple[MazeSpec, SimulationSettings, Genotype]:
    if config.world_path is not None:
        maze, settings = read_world_file(config.world_path)
    else:
        maze, settings = build_t_maze(), SimulationSettings()
    return maze, settings, read_genome_file(config.genome_path)


def _execute(
    job: tuple[Genotype, MazeSpec, Optional[PlasticityConfig], int, SimulationSettings],
) -> TrialRun:
    genotype, maze, plasticity, seed, settings = job
    return run_trial(genotype, maze, plasticity, seed, settings)


def _metrics_row(row: ExperimentRow, mode: ControllerMode) -> list[object]:
    metrics = row.metrics
    return [
        row.trial.name,
        row.trial.direction.value,
        float(row.trial.luminosity),
        row.trial.obstacles,
        row.seed,
        mode.value,
        metrics.success,
        metrics.steps_taken,
        metrics.time_to_goal,
        metrics.path_length,
        metrics.average_speed,
        metrics.final_position_error,
        metrics.min_position_error,
        metrics.collision_steps,
        metrics.weight_change_cumulative,
        metrics.weight_change_per_step,
    ]


def write_trial_files(trial_dir: Path, run: TrialRun, settings: SimulationSettings) -> None:
    outcome = run.outcome
    write_csv(
        trial_dir / "trajectory.csv",
        TRAJECTORY_HEADER,
        (
            (
                index,
                index * settings.dt,
                x,
                y,
                heading,
                outcome.success and index == outcome.steps_taken,
            )
            for index, ((x, y), heading) in enumerate(zip(outcome.trajectory, outcome.headings))
        ),
    )
    write_csv(
        trial_dir / "fitness.csv",
        FITNESS_HEADER,
        ((index, *sample.as_row()) for index, sample in enumerate(run.samples)),
    )
    write_csv(
        trial_dir / "sensors.csv",
        SENSORS_HEADER,
        ((index, *(float(value) for value in inputs)) for index, inputs in enumerate(run.sensor_log)),
    )
    if run.weight_log is not None:
        write_csv(
            trial_dir / "weights.csv",
            WEIGHTS_HEADER,
            (
                (entry.step, entry.fitness, entry.effective_rate, entry.sum_abs_delta, entry.max_abs_weight)
                for entry in run.weight_log
            ),
        )


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run every (trial, seed) pair and write metrics, per-trial logs and a summary."""

    maze, settings, genotype = load_inputs(config)
    plasticity = config.plasticity if config.plasticity.enabled else None
    jobs = [(spec, seed) for spec in config.trials for seed in config.seeds]
    payloads = [(genotype, build_trial_maze(maze, spec), plasticity, seed, settings) for spec, seed in jobs]

    if config.workers > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as executor:
            runs = list(executor.map(_execute, payloads))
    else:
        runs = [_execute(payload) for payload in payloads]

    output_dir = config.output_dir
    output_dir.mkdir(parents=True, exist_ok=True)
    rows: list[ExperimentRow] = []
    for (spec, seed), run in zip(jobs, runs):
        row = ExperimentRow(trial=spec, seed=seed, metrics=run.metrics)
        rows.append(row)
        write_trial_files(output_dir / "trials" / row.trial_id, run, settings)
        LOGGER.info(
            "%s [%s] success=%s error=%.4f",
            row.trial_id,
            config.mode.value,
            run.metrics.success,
            run.metrics.final_position_error,
        )

    result = ExperimentResult(
        mode=config.mode,
        rows=rows,
        output_dir=output_dir,
        base_rate=config.plasticity.base_rate if plasticity is not None else None,
    )
    write_csv(output_dir / "metrics.csv", METRICS_HEADER, (_metrics_row(row, config.mode) for row in rows))
    write_json(
        output_dir / "summary.json",
        {
            "config": config.model_dump(mode="json"),
            "inputs": {
                "world": content_hash(config.world_path) if config.world_path is not None else "default",
                "genome": content_hash(config.genome_path),
            },
            "trials": [
                {"trial": row.trial_id, "seed": row.seed, **row.metrics.model_dump(mode="json")} for row in rows
            ],
            "configurations": [asdict(summary) for summary in result.summaries()],
        },
    )
    return result


def _format_optional(value: Optional[float], spec: str) -> str:
    return "NA" if value is None else format(value, spec)


def format_summary_table(result: ExperimentResult) -> str:
    header = f"{'trial':<28} {'ok':>3} {'time(s)':>9} {'path(m)':>8} {'speed':>8} {'error':>8} {'dW/step':>10}"
    title = f"Mode: {result.mode.label}"
    if result.base_rate is not None:
        title += f" (N = {result.base_rate:g})"
    lines = [title, header, "-" * len(header)]
    for row in result.rows:
        metrics = row.metrics
        time_text = _format_optional(metrics.time_to_goal, ".2f")
        change_text = _format_optional(metrics.weight_change_per_step, ".6f")
        lines.append(
            f"{row.trial_id:<28} {int(metrics.success):>3} {time_text:>9} {metrics.path_length:>8.4f} "
            f"{metrics.average_speed:>8.4f} {metrics.final_position_error:>8.4f} {change_text:>10}"
        )

    summaries = result.summaries()
    if summaries:
        config_header = f"{'configuration':<28} {'n':>3} {'success':>9} {'path(m)':>8} {'error':>8} {'dW/step':>10}"
        lines += ["", config_header, "-" * len(config_header)]
        for summary in summaries:
            lines.append(
                f"{summary.label:<28} {summary.trials:>3} {summary.success_rate:>9.2f} "
                f"{summary.mean_path_length:>8.4f} {summary.mean_final_error:>8.4f} "
                f"{_format_optional(summary.mean_weight_change, '.6f'):>10}"
            )
    return "\n".join(lines)


SWEEP_HEADER: tuple[str, ...] = (
    "run",
    "mode",
    "base_rate",
    "configuration",
    "trials",
    "success_rate",
    "mean_path_length",
    "mean_final_error",
    "mean_weight_change",
)


def sweep_label(mode: ControllerMode, base_rate: Optional[float]) -> str:
    if mode is ControllerMode.GA or base_rate is None:
        return ControllerMode.GA.value
    return f"{mode.value}_{base_rate:g}"


def sweep_variants(
    modes: Sequence[ControllerMode], base_rates: Sequence[float]
) -> list[tuple[ControllerMode, Optional[float]]]:
    """Distinct (mode, rate) pairs; ga ignores the rate and runs once."""

    variants: dict[str, tuple[ControllerMode, Optional[float]]] = {}
    for mode in modes:
        rates: Sequence[Optional[float]] = [None] if mode is ControllerMode.GA else base_rates
        for rate in rates:
            variants.setdefault(sweep_label(mode, rate), (mode, rate))
    return list(variants.values())


def run_sweep(
    config: ExperimentConfig, modes: Sequence[ControllerMode], base_rates: Sequence[float]
) -> list[ExperimentResult]:
    """Run the trial set once per (mode, base rate).

    A single variant writes straight into ``config.output_dir``; several variants each get
    ``output_dir/<mode>_<rate>`` (``output_dir/ga`` for the fixed controller). ``sweep.csv`` in
    ``output_dir`` collects the per-configuration summaries of every variant.
    """

    variants = sweep_variants(modes, base_rates)
    if not variants:
        raise ValueError("A sweep needs at least one mode and, for hebbian mode, one base rate.")

    planned: list[tuple[str, ExperimentConfig]] = []
    for mode, rate in variants:
        label = sweep_label(mode, rate)
        plasticity = PlasticityConfig.model_validate(
            {
                **config.plasticity.model_dump(),
                "enabled": mode is ControllerMode.HEBBIAN,
                **({"base_rate": rate} if rate is not None else {}),
            }
        )
        output_dir = config.output_dir if len(variants) == 1 else config.output_dir / label
        variant = ExperimentConfig.model_validate(
            {**config.model_dump(), "mode": mode, "plasticity": plasticity, "output_dir": output_dir}
        )
        planned.append((label, variant))

    results: list[ExperimentResult] = []
    for label, variant in planned:
        LOGGER.info("Sweep variant %s -> %s", label, variant.output_dir)
        results.append(run_experiment(variant))

    write_csv(
        config.output_dir / "sweep.csv",
        SWEEP_HEADER,
        (
            (
                sweep_label(result.mode, result.base_rate),
                result.mode.value,
                result.base_rate,
                summary.label,
                summary.trials,
                summary.success_rate,
                summary.mean_path_length,
                summary.mean_final_error,
                summary.mean_weight_change,
            )
            for result in results
            for summary in result.summaries()
        ),
    )
    return results


def experiment_dirs(root: Path) -> list[Path]:
    """``root`` itself when it holds trials, otherwise every sweep variant below it."""

    if (root / "trials").is_dir() or not root.is_dir():
        return [root]
    variants = sorted(path for path in root.iterdir() if (path / "trials").is_dir())
    return variants or [root]


def resolve_trials(preset: Optional[str], *, luminosity: float, obstacles: int) -> list[TrialSpec]:
    if preset is None:
        return trials_for(luminosity=luminosity, obstacles=obstacles)
    presets = {"dimming": dimming_trials, "obstacles": obstacle_trials}
    if preset not in presets:
        raise ValueError(f"Unknown preset {preset!r}; choose from {sorted(presets)}.")
    return presets[preset]()


CORRELATION_HEADER: tuple[str, ...] = ("signal", "correlation", "defined")


def load_weight_log(trial_dir: Path) -> list[WeightChangeEntry]:
    columns = read_csv_floats(trial_dir / "weights.csv")
    return [
        WeightChangeEntry(
            step=int(step),
            fitness=fitness,
            effective_rate=rate,
            sum_abs_delta=change,
            max_abs_weight=largest,
        )
        for step, fitness, rate, change, largest in zip(
            columns["step"], columns["F"], columns["N_e"], columns["sum_abs_delta"], columns["max_abs_weight"]
        )
    ]


def load_sensor_log(trial_dir: Path) -> list[list[float]]:
    columns = read_csv_floats(trial_dir / "sensors.csv")
    missing = [channel for channel in SENSOR_CHANNELS if channel not in columns]
    if missing:
        raise StorageError(f"{trial_dir / 'sensors.csv'} lacks columns {missing}.")
    return [list(values) for values in zip(*(columns[channel] for channel in SENSOR_CHANNELS))]


def report_trial(trial_dir: Path) -> CorrelationReport:
    """Correlate one trial's weight change with F and the sensors, writing ``correlation.csv``."""

    report = correlation_report(load_weight_log(trial_dir), load_sensor_log(trial_dir))
    rows: list[tuple[str, Optional[float], bool]] = [
        ("F", None if math.isnan(report.fitness_correlation) else report.fitness_correlation,
         report.fitness_correlation_defined),
    ]
    for channel, value in report.sensor_correlations.items():
        rows.append((channel, None if math.isnan(value) else value, not math.isnan(value)))
    write_csv(trial_dir / "correlation.csv", CORRELATION_HEADER, rows)
    if not report.fitness_correlation_defined:
        LOGGER.warning("Correlation with F is undefined for %s (constant series).", trial_dir.name)
    return report


def report_experiment(output_dir: Path) -> dict[str, CorrelationReport]:
    """Report every trial directory that carries a weight log; ga-mode trials are skipped."""

    trials_root = output_dir / "trials"
    if not trials_root.is_dir():
        raise StorageError(f"No trials directory under {output_dir}.")
    reports: dict[str, CorrelationReport] = {}
    for trial_dir in sorted(path for path in trials_root.iterdir() if path.is_dir()):
        if not (trial_dir / "weights.csv").exists():
            LOGGER.info("Skipping %s: no weight log.", trial_dir.name)
            continue
        reports[trial_dir.name] = report_trial(trial_dir)
    return reports


__all__ = [
    "load_sensor_log",
    "load_weight_log",
    "report_experiment",
    "report_trial",
    "ExperimentResult",
    "ExperimentRow",
    "build_trial_maze",
    "dimming_trials",
    "format_summary_table",
    "group_trial_ids",
    "load_inputs",
    "obstacle_trials",
    "resolve_trials",
    "experiment_dirs",
    "run_experiment",
    "run_sweep",
    "sweep_label",
    "sweep_variants",
    "trials_for",
    "write_trial_files",
]
